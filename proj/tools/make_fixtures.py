#!/usr/bin/env python3
# Copyright 2026 The evoheur Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the checked-in test fixtures, configs and manifests.

Run from anywhere; paths are relative to the repository root. The output
is deterministic, so re-running it leaves the tree unchanged.
"""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
GUEST = ROOT / "tests" / "fixtures" / "guest"
REPLAY = ROOT / "tests" / "fixtures" / "replay"
MANIFESTS = ROOT / "data" / "manifests"
CONFIGS = ROOT / "configs"


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def write_json(path, obj):
    write(path, json.dumps(obj, indent=2) + "\n")


def write_jsonl(path, records):
    write(path, "".join(json.dumps(r, sort_keys=True) + "\n" for r in records))


def num(x):
    return repr(float(x))


# Guest heuristics. The directive line selects the stub runner policy that
# mirrors the Python body.

def tsp_weighted(near, dest=0.0, look=0.0, note="Weighted nearest neighbor."):
    params = f"near={num(near)} dest={num(dest)} lookahead={num(look)}"
    body = [
        f"# stub-policy: tsp.weighted {params}",
        f"# {note}",
        "def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):",
        "    best = None",
        "    best_score = None",
        "    for node in unvisited_nodes:",
        f"        score = -{num(near)} * distance_matrix[current_node][node]",
        f"        score -= {num(dest)} * distance_matrix[node][destination_node]",
    ]
    if look:
        body += [
            "        if len(unvisited_nodes) > 1:",
            "            nearest = min(distance_matrix[node][k] for k in unvisited_nodes if k != node)",
            f"            score -= {num(look)} * nearest",
        ]
    body += [
        "        if best_score is None or score > best_score:",
        "            best = node",
        "            best_score = score",
        "    return best",
        "",
    ]
    return "\n".join(body)


TSP_NEAREST = """# stub-policy: tsp.weighted near=1
# Nearest neighbor: go to the closest unvisited city.
def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):
    best = None
    best_dist = None
    for node in unvisited_nodes:
        d = distance_matrix[current_node][node]
        if best is None or d < best_dist:
            best = node
            best_dist = d
    return best
"""

BPP_BEST_FIT = """# stub-policy: bpp.weighted fit=1
# Best fit: prefer the feasible bin that is left with the least room.
def priority(item, bins):
    return [-(capacity - item) for capacity in bins]
"""

BPP_FIRST_FIT = """# stub-policy: bpp.weighted fit=0 index=1
# First fit: prefer the lowest-indexed feasible bin.
def priority(item, bins):
    return [-float(i) for i in range(len(bins))]
"""

PFSP_TOTAL = """# stub-policy: pfsp.weighted total=1
# Longest total processing time first.
def job_priority(current_completion, unscheduled_jobs, processing_times):
    return [sum(row[j] for row in processing_times) for j in unscheduled_jobs]
"""

MKP_VALUE = """# stub-policy: mkp.weighted density=0 value=1
# Most valuable item first.
def item_priority(remaining_capacity, candidate_items, values, weights):
    return [float(values[j]) for j in candidate_items]
"""

LOOP_BRANCH = """# One loop holding one conditional.
def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):
    best = unvisited_nodes[0]
    for node in unvisited_nodes:
        if distance_matrix[current_node][node] < distance_matrix[current_node][best]:
            best = node
    return best
"""


def faulty(mode, at=0, entry="select_next_node", params=None):
    args = params or "current_node, destination_node, unvisited_nodes, distance_matrix"
    bodies = {
        "crash": "    return 1 // 0",
        "hang": "    while True:\n        pass",
        "invalid": "    return 0" if entry == "select_next_node" else "    return [float('nan')]",
        "abort": "    raise SystemExit(134)",
        "garbage": "    print('not json')\n    return unvisited_nodes[0]",
    }
    return (
        f"# stub-policy: {mode} at={at}\n"
        f"# Fault injection: {mode}.\n"
        f"def {entry}({args}):\n{bodies[mode]}\n"
    )


def fenced(code, prose="Here is the heuristic."):
    return f"{prose}\n\n```python\n{code}```\n\nIt follows the requested signature.\n"


def proposal(ideas):
    return json.dumps(
        {"strategies": [{"idea": i, "target_behavior": t} for i, t in ideas]}, indent=1
    )


def rec(role, text, tokens_in, tokens_out):
    return {"role_tag": role, "text": text, "tokens_in": tokens_in, "tokens_out": tokens_out}


def guest_fixtures():
    write(GUEST / "tsp_nearest.py", TSP_NEAREST)
    write(GUEST / "bpp_best_fit.py", BPP_BEST_FIT)
    write(GUEST / "bpp_first_fit.py", BPP_FIRST_FIT)
    write(GUEST / "pfsp_total.py", PFSP_TOTAL)
    write(GUEST / "mkp_value.py", MKP_VALUE)
    write(GUEST / "loop_branch.py", LOOP_BRANCH)
    for mode in ("crash", "hang", "invalid", "abort", "garbage"):
        write(GUEST / f"tsp_{mode}.py", faulty(mode, at=1))
    write(GUEST / "bpp_invalid.py", faulty("invalid", 0, "priority", "item, bins"))
    write(GUEST / "syntax_error.py", "def select_next_node(a, b, c, d)\n    return c[0]\n")


# Golden five-generation run: population 4, three strategies per generation.

def golden_records():
    r = []
    seeds = [
        fenced(TSP_NEAREST),
        fenced(tsp_weighted(1, 0.5, note="Nearest neighbor pulled toward the start.")),
        tsp_weighted(1, 0, 0.5, note="Nearest neighbor with a one-step lookahead."),
        fenced(faulty("crash", 2), "This one divides carefully."),
    ]
    for i, s in enumerate(seeds):
        r.append(rec("seed", s, 300 + i, 120 + 10 * i))

    gens = [
        (
            [("Penalize cities far from the start late in the tour", "runtime"),
             ("Blend nearest distance with a lookahead term", "runtime"),
             ("Prefer cities that keep the remaining set compact", "static")],
            [fenced(tsp_weighted(1, 0.25, note="Light pull toward the start.")),
             fenced(tsp_weighted(1, 0, 0.25, note="Light lookahead.")),
             "I could not produce code for this idea."],
        ),
        (
            [("Stronger lookahead", "runtime"),
             ("Negative start pull to sweep outward first", "runtime"),
             ("Reuse nearest neighbor exactly", "static")],
            [tsp_weighted(1, 0, 1.0, note="Full lookahead."),
             fenced(tsp_weighted(1, -0.25, note="Sweep outward.")),
             fenced(TSP_NEAREST.replace("closest unvisited city", "nearest city"))],
        ),
        (
            [("Mix lookahead with start pull", "runtime"),
             ("Return an arbitrary city when unsure", "runtime"),
             ("Use the operating system for randomness", "static")],
            [fenced(tsp_weighted(1, 0.1, 0.5, note="Lookahead and start pull.")),
             fenced(faulty("invalid", 3), "Fast version."),
             fenced("# stub-policy: tsp.weighted near=1\nimport os\n"
                    "def select_next_node(current_node, destination_node, unvisited_nodes,"
                    " distance_matrix):\n    return unvisited_nodes[0]\n")],
        ),
        (
            [("Scale distances before comparing", "runtime"),
             ("Weighted lookahead at two levels", "runtime"),
             ("A syntactically bold variant", "static")],
            [fenced(tsp_weighted(2, 0, 0.5, note="Scaled distances.")),
             fenced(tsp_weighted(1, 0.05, 0.75, note="Two weights.")),
             fenced("# stub-policy: tsp.weighted near=1\n"
                    "def select_next_node(current_node, destination_node, unvisited_nodes,"
                    " distance_matrix)\n    return unvisited_nodes[0]\n")],
        ),
        (
            [("Tiny lookahead", "runtime"),
             ("Moderate start pull with lookahead", "runtime"),
             ("Lookahead slightly above one", "runtime")],
            [fenced(tsp_weighted(1, 0, 0.1, note="Tiny lookahead.")),
             fenced(tsp_weighted(1, 0.3, 0.3, note="Balanced.")),
             fenced(tsp_weighted(1, 0, 1.25, note="Heavy lookahead."))],
        ),
    ]
    for g, (ideas, codes) in enumerate(gens, start=1):
        r.append(rec("proposer", "Proposals follow.\n" + proposal(ideas), 900 + g, 200 + g))
        for i, c in enumerate(codes):
            r.append(rec("generator", c, 400 + 10 * g + i, 150 + i))
    return r


# Plateau run: only generation 1 improves; later candidates are worse.

def plateau_records():
    r = [
        rec("seed", fenced(tsp_weighted(-1, note="Farthest neighbor.")), 300, 100),
        rec("seed", fenced(tsp_weighted(-1, 0.5, note="Farthest neighbor near the start.")),
            301, 101),
        rec("seed", fenced(tsp_weighted(0.5, -1, note="Away from the start.")), 302, 102),
    ]
    for g in range(1, 11):
        r.append(rec("proposer", proposal([(f"Variant {g}a", "runtime"),
                                           (f"Variant {g}b", "static")]), 800 + g, 90))
        if g == 1:
            r.append(rec("generator", fenced(TSP_NEAREST), 400, 120))
        else:
            r.append(rec("generator", fenced(tsp_weighted(-1, 0.1 * g, note="Farther.")),
                         400 + g, 120))
        r.append(rec("generator", fenced(tsp_weighted(-2, 0.1 * g, note="Farthest.")),
                     450 + g, 121))
    return r


# Hand-simulated three-generation run on a 2 x 1 rectangle (optimum 6).
#   seeds: s00 farthest (length 4 + 2 sqrt 5), s01 crashes -> P0 = [s00]
#   g1: c0 nearest neighbor (length 6), c1 infeasible -> P1 = [g001-c0, g000-s00]
#   g2: c0 duplicates g001-c0, c1 index order (length 6) -> P2 = [g001-c0, g002-c1]
#   g3: c0 syntax error, c1 farthest with another weight -> P3 = [g001-c0, g002-c1]

def handsim_records():
    return [
        rec("seed", fenced(tsp_weighted(-1, note="Farthest neighbor.")), 100, 50),
        rec("seed", fenced(faulty("crash", 0)), 100, 50),
        rec("proposer", proposal([("Go to the nearest city", "runtime"),
                                  ("Return to the start", "runtime")]), 200, 60),
        rec("generator", fenced(TSP_NEAREST), 110, 55),
        rec("generator", fenced(faulty("invalid", 0)), 110, 55),
        rec("proposer", proposal([("Nearest again", "runtime"),
                                  ("Visit cities in index order", "static")]), 200, 60),
        rec("generator", fenced(TSP_NEAREST.replace("closest unvisited city", "closest city")),
            110, 55),
        rec("generator", fenced(tsp_weighted(0, note="Index order.")), 110, 55),
        rec("proposer", proposal([("Unfinished code", "static"),
                                  ("Doubly farthest", "runtime")]), 200, 60),
        rec("generator", fenced("def select_next_node(a, b, c, d)\n    return c[0]\n"), 110, 55),
        rec("generator", fenced(tsp_weighted(-2, note="Doubly farthest.")), 110, 55),
    ]


# Garbage backend: non-JSON proposals and prose instead of code.

def garbage_records():
    r = [
        rec("seed", "I would rather describe the idea in words.", 50, 20),
        rec("seed", fenced("def helper(x):\n    return x\n"), 50, 20),
    ]
    junk = "Strategies: try harder, think more, be greedy."
    # g1: both proposals unparsable; g2: the resample parses; g3: both unparsable.
    for text in (junk, junk, junk, proposal([("Be greedy", "runtime"), ("Be lazy", "static")]),
                 junk, junk):
        r.append(rec("proposer", text, 60, 30))
    r.append(rec("generator", "no code here", 60, 30))
    return r


# Malformed proposer completions with the documented decision for k = 3.
# "ideas" is the accepted list, or null when the completion is rejected.

def proposer_corpus():
    good = [{"idea": "a"}, {"idea": "b"}]
    cases = [
        ("plain_json", json.dumps({"strategies": good}), ["a", "b"]),
        ("json_fence", "```json\n" + json.dumps({"strategies": good}) + "\n```", ["a", "b"]),
        ("prose_before_after", "Sure!\n" + json.dumps({"strategies": good}) + "\nDone.",
         ["a", "b"]),
        ("truncated", '{"strategies": [{"idea": "a"}, {"idea": "b"', None),
        ("single_quotes", "{'strategies': [{'idea': 'a'}]}", None),
        ("trailing_comma", '{"strategies": [{"idea": "a"},]}', None),
        ("empty_array", '{"strategies": []}', None),
        ("wrong_key", '{"ideas": [{"idea": "a"}]}', None),
        ("strategies_not_array", '{"strategies": {"idea": "a"}}', None),
        ("blank_ideas", '{"strategies": [{"idea": "  "}, {"idea": ""}]}', None),
        ("non_string_idea", '{"strategies": [{"idea": 3}, {"idea": "b"}]}', ["b"]),
        ("duplicate_ideas", '{"strategies": [{"idea": "a"}, {"idea": " a "}, {"idea": "c"}]}',
         ["a", "c"]),
        ("more_than_k", json.dumps({"strategies": [{"idea": x} for x in "abcde"]}),
         ["a", "b", "c"]),
        ("nested_in_object", '{"result": {"strategies": [{"idea": "inner"}]}}', ["inner"]),
        ("brace_in_string", '{"strategies": [{"idea": "use {x} sets"}]}', ["use {x} sets"]),
        ("decoy_object_first", '{"note": "hi"} then {"strategies": [{"idea": "real"}]}',
         ["real"]),
        ("two_objects", '{"strategies": [{"idea": "first"}]}\n{"strategies": [{"idea": "x"}]}',
         ["first"]),
        ("no_json", "I suggest trying nearest neighbor with lookahead.", None),
        ("entries_not_objects", '{"strategies": ["a", "b"]}', None),
        ("extra_fields", '{"strategies": [{"idea": "a", "target_behavior": "runtime", '
         '"score": 1}]}', ["a"]),
    ]
    return [{"name": n, "text": t, "k": 3, "ideas": i} for n, t, i in cases]


def manifests():
    write_json(MANIFESTS / "tsp_train_small.json", {
        "task": "tsp",
        "instances": [{"generate": {"size": 12, "seed": s}, "reference": "exact"}
                      for s in range(3)],
    })
    write_json(MANIFESTS / "handsim_rectangle.json", {
        "task": "tsp",
        "instances": [{"instance": {"kind": "tsp", "name": "rect2x1",
                                    "coords": [[0, 0], [2, 0], [2, 1], [0, 1]]},
                       "reference": "exact"}],
    })
    write_json(MANIFESTS / "bpp_weibull5k.json", {
        "task": "bpp",
        "instances": [{"generate": {"size": 5000, "capacity": 100, "seed": s}}
                      for s in range(5)],
    })
    write_json(MANIFESTS / "bpp_train.json", {
        "task": "bpp",
        "instances": [{"generate": {"size": 500, "capacity": 100, "seed": 100 + s}}
                      for s in range(3)],
    })
    write_json(MANIFESTS / "pfsp_train.json", {
        "task": "pfsp",
        "instances": [{"generate": {"size": 8, "machines": 4, "seed": s}, "reference": "exact"}
                      for s in range(3)],
    })
    write_json(MANIFESTS / "pfsp_taillard.json", {
        "task": "pfsp", "instances": [{"path": "../pfsp/ta001.txt"}],
    })
    write_json(MANIFESTS / "mkp_train.json", {
        "task": "mkp",
        "instances": [{"generate": {"size": 20, "constraints": 5, "seed": s},
                       "reference": "exact"} for s in range(3)],
    })
    write_json(MANIFESTS / "tsp_berlin52.json", {
        "task": "tsp", "instances": [{"path": "../tsp/berlin52.tsp", "reference": 7542}],
    })


def config(manifest, fixtures, **over):
    c = {
        "task": "tsp",
        "generations": 5,
        "population": 4,
        "proposals": 3,
        "retrieval": 2,
        "centroids": 8,
        "patience": 10,
        "min_improvement": 1e-4,
        "keep_ratio": 0.6,
        "n_proc": 4,
        "time_budget_seconds": 0,
        "token_budget": 0,
        "candidate_timeout_seconds": 10,
        "seeds": [0],
        "backend": {"kind": "replay", "fixtures": fixtures},
        "manifest": manifest,
        "out": "../runs",
        "cvt_samples": 2000,
        "cvt_iterations": 20,
    }
    c.update(over)
    return c


def configs():
    write_json(CONFIGS / "golden.json",
               config("../data/manifests/tsp_train_small.json",
                      "../tests/fixtures/replay/golden.jsonl"))
    write_json(CONFIGS / "plateau.json",
               config("../data/manifests/tsp_train_small.json",
                      "../tests/fixtures/replay/plateau.jsonl",
                      generations=10, population=3, proposals=2, patience=2, keep_ratio=1.0))
    write_json(CONFIGS / "handsim.json",
               config("../data/manifests/handsim_rectangle.json",
                      "../tests/fixtures/replay/handsim.jsonl",
                      generations=3, population=2, proposals=2, keep_ratio=1.0, centroids=4,
                      cvt_samples=500))
    write_json(CONFIGS / "garbage.json",
               config("../data/manifests/tsp_train_small.json",
                      "../tests/fixtures/replay/garbage.jsonl",
                      generations=3, population=2, proposals=2))
    example = config("../data/manifests/tsp_berlin52.json", "", generations=30,
                     population=10, proposals=4, patience=3, keep_ratio=0.5, n_proc=12,
                     time_budget_seconds=3600, candidate_timeout_seconds=60, seeds=[0, 1, 2],
                     centroids=25, cvt_samples=10000, cvt_iterations=50)
    example["backend"] = {"kind": "http", "base_url": "https://api.openai.com/v1",
                          "model": "gpt-4o-mini", "temperature": 1.0,
                          "api_key_env": "OPENAI_API_KEY"}
    write_json(CONFIGS / "example.json", example)


def main():
    guest_fixtures()
    write_jsonl(REPLAY / "golden.jsonl", golden_records())
    write_jsonl(REPLAY / "plateau.jsonl", plateau_records())
    write_jsonl(REPLAY / "handsim.jsonl", handsim_records())
    write_jsonl(REPLAY / "garbage.jsonl", garbage_records())
    write_json(ROOT / "tests" / "fixtures" / "proposer_corpus.json", proposer_corpus())
    manifests()
    configs()


if __name__ == "__main__":
    main()
