// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "evoheur/agents.hpp"
#include "evoheur/archive.hpp"
#include "evoheur/behavior.hpp"
#include "evoheur/core.hpp"
#include "evoheur/evaluator.hpp"
#include "evoheur/rng.hpp"
#include "evoheur/tasks.hpp"
#include "evoheur/workflow.hpp"

namespace fs = std::filesystem;
using namespace evoheur;

namespace {

const fs::path kSource = EVOHEUR_SOURCE_DIR;
const fs::path kBinary = EVOHEUR_BINARY_DIR;

struct Check {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = kBinary / "acceptance_scratch" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Gap formula on the printed table rows.
Check gap_formula() {
  Check c;
  const double a = relative_gap({10.698, Direction::kMinimize}, 10.679);
  c.expect(a >= 0.172 && a <= 0.183, "gap(10.698, 10.679) = " + fmt("%.4f", a));
  const double b = relative_gap({114421, Direction::kMinimize}, 106992);
  c.expect(std::abs(b - 6.944) <= 0.001, "gap(114421, 106992) = " + fmt("%.4f", b));
  c.detail = c.ok ? fmt("%.4f%%", a) + " " + fmt("%.4f%%", b) : c.detail;
  return c;
}

// Best Fit / First Fit mean excess over L2 on five Weibull streams.
Check bpp_baselines() {
  Check c;
  double bf = 0, ff = 0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto b = std::get<tasks::BppInstance>(
        tasks::generate_instance(tasks::TaskKind::kBpp, {.size = 5000, .capacity = 100}, s));
    const double l2 = tasks::l2_lower_bound(b.items, b.capacity);
    bf += relative_gap({static_cast<double>(tasks::bins_used(tasks::best_fit(b.items, 100))),
                        Direction::kMinimize},
                       l2) /
          5.0;
    ff += relative_gap({static_cast<double>(tasks::bins_used(tasks::first_fit(b.items, 100))),
                        Direction::kMinimize},
                       l2) /
          5.0;
  }
  c.expect(std::abs(bf - 4.149) <= 0.5, "best fit " + fmt("%.3f%%", bf));
  c.expect(std::abs(ff - 4.488) <= 0.5, "first fit " + fmt("%.3f%%", ff));
  if (c.ok) c.detail = "best_fit=" + fmt("%.3f%%", bf) + " first_fit=" + fmt("%.3f%%", ff);
  return c;
}

// Exhaustive optimum: items placed in order into an existing bin or one new bin.
int bpp_optimum(const std::vector<int>& items, int cap) {
  int best = static_cast<int>(items.size());
  std::vector<int> load;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (static_cast<int>(load.size()) >= best) return;
    if (i == items.size()) {
      best = static_cast<int>(load.size());
      return;
    }
    for (std::size_t b = 0; b < load.size(); ++b) {
      if (load[b] + items[i] <= cap) {
        load[b] += items[i];
        rec(i + 1);
        load[b] -= items[i];
      }
    }
    load.push_back(items[i]);
    rec(i + 1);
    load.pop_back();
  };
  rec(0);
  return best;
}

Check l2_soundness() {
  Check c;
  Rng rng(2024);
  for (int t = 0; t < 500 && c.ok; ++t) {
    const int cap = static_cast<int>(rng.uniform_int(5, 100));
    const int n = static_cast<int>(rng.uniform_int(1, 8));
    std::vector<int> items;
    for (int i = 0; i < n; ++i) items.push_back(static_cast<int>(rng.uniform_int(1, cap)));
    const int opt = bpp_optimum(items, cap);
    const int l2 = tasks::l2_lower_bound(items, cap);
    const int bf = tasks::bins_used(tasks::best_fit(items, cap));
    const int ff = tasks::bins_used(tasks::first_fit(items, cap));
    c.expect(l2 <= opt, "stream " + std::to_string(t) + ": L2 exceeds optimum");
    c.expect(bf >= opt && ff >= opt, "stream " + std::to_string(t) + ": baseline below optimum");
  }
  if (c.ok) c.detail = "500 streams";
  return c;
}

int hand_makespan(const std::vector<std::vector<int>>& p, const std::vector<int>& seq) {
  const std::size_t m = p.front().size();
  std::vector<int> done(m, 0);
  for (int j : seq) {
    done[0] += p[j][0];
    for (std::size_t k = 1; k < m; ++k) done[k] = std::max(done[k], done[k - 1]) + p[j][k];
  }
  return done[m - 1];
}

Check pfsp_oracle() {
  Check c;
  tasks::PfspInstance two;
  two.ptimes = {{3, 2}, {1, 4}};
  c.expect(tasks::makespan(two, std::vector<int>{1, 0}) == 7, "2x2 order (1,0) != 7");
  c.expect(tasks::makespan(two, std::vector<int>{0, 1}) == 9, "2x2 order (0,1) != 9");
  c.expect(hand_makespan(two.ptimes, {1, 0}) == 7 && hand_makespan(two.ptimes, {0, 1}) == 9,
           "hand recurrence disagrees");
  Rng rng(77);
  for (int t = 0; t < 200 && c.ok; ++t) {
    tasks::PfspInstance p;
    const int n = static_cast<int>(rng.uniform_int(1, 7));
    const int m = static_cast<int>(rng.uniform_int(1, 4));
    p.ptimes.assign(n, std::vector<int>(m));
    for (auto& row : p.ptimes) {
      for (auto& x : row) x = static_cast<int>(rng.uniform_int(1, 99));
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    int opt = std::numeric_limits<int>::max();
    do {
      opt = std::min(opt, hand_makespan(p.ptimes, perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto neh = tasks::neh(p);
    const auto gupta = tasks::gupta(p);
    c.expect(tasks::makespan(p, neh) == hand_makespan(p.ptimes, neh),
             "instance " + std::to_string(t) + ": recurrence mismatch");
    c.expect(tasks::makespan(p, neh) >= opt && tasks::makespan(p, gupta) >= opt,
             "instance " + std::to_string(t) + ": heuristic below optimum");
  }
  if (c.ok) c.detail = "200 instances";
  return c;
}

Check mkp_oracle() {
  Check c;
  Rng rng(31);
  for (int t = 0; t < 100 && c.ok; ++t) {
    const int n = static_cast<int>(rng.uniform_int(1, 14));
    const int m = static_cast<int>(rng.uniform_int(1, 5));
    tasks::MkpInstance inst;
    inst.values.resize(n);
    inst.weights.assign(m, std::vector<int>(n));
    inst.capacities.resize(m);
    for (auto& v : inst.values) v = static_cast<int>(rng.uniform_int(1, 100));
    for (int k = 0; k < m; ++k) {
      long total = 0;
      for (auto& w : inst.weights[k]) {
        w = static_cast<int>(rng.uniform_int(1, 60));
        total += w;
      }
      inst.capacities[k] = static_cast<int>(std::max<long>(1, total / 2));
    }
    long best = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      long value = 0;
      bool feasible = true;
      for (int k = 0; k < m && feasible; ++k) {
        long load = 0;
        for (int i = 0; i < n; ++i) {
          if (mask >> i & 1u) load += inst.weights[k][i];
        }
        feasible = load <= inst.capacities[k];
      }
      if (!feasible) continue;
      for (int i = 0; i < n; ++i) {
        if (mask >> i & 1u) value += inst.values[i];
      }
      best = std::max(best, value);
    }
    const auto ref = tasks::reference_bound(inst);
    const double greedy = tasks::evaluate_solution(inst, tasks::Selection{tasks::greedy_density(inst)}).value;
    c.expect(ref.value == static_cast<double>(best),
             "instance " + std::to_string(t) + ": reference " + fmt("%.0f", ref.value) +
                 " vs enumeration " + std::to_string(best));
    c.expect(greedy <= ref.value, "instance " + std::to_string(t) + ": greedy exceeds reference");
  }
  if (c.ok) c.detail = "100 instances";
  return c;
}

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

int brute_cell(const std::vector<double>& v, const archive::CentroidSet& cs) {
  int best = 0;
  for (int i = 1; i < cs.count(); ++i) {
    if (dist2(v, cs.centroids[i]) < dist2(v, cs.centroids[best])) best = i;
  }
  return best;
}

EvaluatedCandidate candidate(const std::string& id, double loss, std::vector<double> b) {
  EvaluatedCandidate c;
  c.heuristic.id = id;
  c.heuristic.source = "def f():\n    return 0\n";
  c.heuristic.strategy_text = "candidate " + id;
  c.fitness = FitnessScore{loss};
  c.behavior_norm = b;
  c.behavior_raw = std::move(b);
  return c;
}

std::vector<double> random_point(Rng& rng, int dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.uniform01();
  return v;
}

Check archive_properties() {
  Check c;
  Rng rng(99);
  for (int seq = 0; seq < 10000 && c.ok; ++seq) {
    const int dim = static_cast<int>(rng.uniform_int(1, 4));
    const int count = static_cast<int>(rng.uniform_int(1, 10));
    const auto cs = archive::build_centroids(dim, count, rng.next_u64(), {100, 3});
    archive::Archive a(cs, 25);
    std::map<int, double> best;
    const int n = static_cast<int>(rng.uniform_int(1, 20));
    for (int i = 0; i < n; ++i) {
      const auto v = random_point(rng, dim);
      const double loss = static_cast<double>(rng.uniform_int(0, 6)) / 6.0;
      const int cell = brute_cell(v, cs);
      best[cell] = best.count(cell) ? std::min(best[cell], loss) : loss;
      a.insert(candidate("c" + std::to_string(i), loss, v));
    }
    c.expect(a.occupied() == static_cast<int>(best.size()) && a.occupied() <= count,
             "sequence " + std::to_string(seq) + ": occupied count");
    for (const auto& [cell, inc] : a.cells()) {
      c.expect(brute_cell(inc.behavior_norm, cs) == cell,
               "sequence " + std::to_string(seq) + ": incumbent in wrong cell");
      c.expect(best.count(cell) && inc.loss() == best[cell],
               "sequence " + std::to_string(seq) + ": incumbent is not the cell minimum");
    }
    c.expect(archive::coverage(a) == static_cast<double>(best.size()) / cs.count(),
             "sequence " + std::to_string(seq) + ": coverage");
  }

  for (int t = 0; t < 1000 && c.ok; ++t) {
    const int dim = static_cast<int>(rng.uniform_int(1, 11));
    archive::CentroidSet cs;
    cs.dim = dim;
    const int count = static_cast<int>(rng.uniform_int(1, 25));
    for (int i = 0; i < count; ++i) cs.centroids.push_back(random_point(rng, dim));
    const auto v = random_point(rng, dim);
    c.expect(archive::assign_cell(v, cs) == brute_cell(v, cs),
             "assign_cell pair " + std::to_string(t));
  }

  const int cells = 9;
  const auto cs = archive::build_centroids(3, cells, 5, {500, 10});
  int subsets = 0;
  for (std::uint32_t mask = 1; mask < (1u << cells) && c.ok; ++mask) {
    const int size = __builtin_popcount(mask);
    if (size > 6) continue;
    ++subsets;
    archive::Archive a(cs, 25);
    std::vector<int> occupied;
    for (int k = 0; k < cells; ++k) {
      if (!(mask >> k & 1u)) continue;
      occupied.push_back(k);
      a.insert(candidate("x" + std::to_string(k), static_cast<double>(rng.uniform_int(0, 3)) / 3.0,
                         cs.centroids[k]));
    }
    const auto ex = archive::retrieve_exemplars(a, Population{}, 2);
    const auto& inc = a.cells();
    int first = occupied[0];
    for (int k : occupied) {
      if (fitter(inc.at(k), inc.at(first))) first = k;
    }
    if (size == 1) {
      c.expect(ex.size() == 1 && ex[0].cell_id == first, "single-cell subset");
      continue;
    }
    int second = -1;
    double far = -1;
    for (int k : occupied) {
      if (k == first) continue;
      const double d = dist2(cs.centroids[first], cs.centroids[k]);
      if (d > far || (d == far && fitter(inc.at(k), inc.at(second)))) {
        far = d;
        second = k;
      }
    }
    c.expect(ex.size() == 2 && ex[0].cell_id == first && ex[1].cell_id == second,
             "retrieve subset mask " + std::to_string(mask));
  }
  if (c.ok) {
    c.detail = "10000 sequences, 1000 assignments, " + std::to_string(subsets) + " subsets";
  }
  return c;
}

workflow::RunResult replay_run(const std::string& config, const fs::path& dir,
                               int split_after = -1) {
  auto cfg = workflow::load_config(kSource / "configs" / (config + ".json"));
  if (split_after >= 0) {
    auto backend = agents::ScriptedReplayBackend::from_file(cfg.backend.fixtures);
    workflow::Engine e(cfg, 0, backend, dir);
    e.initialize();
    for (int g = 0; g < split_after; ++g) e.gen_step();
    auto resumed = agents::ScriptedReplayBackend::from_file(cfg.backend.fixtures);
    workflow::Engine r(cfg, 0, resumed, dir);
    r.resume();
    return r.run();
  }
  auto backend = agents::ScriptedReplayBackend::from_file(cfg.backend.fixtures);
  workflow::Engine e(cfg, 0, backend, dir);
  e.initialize();
  return e.run();
}

Check end_to_end() {
  Check c;
  const auto golden = read_file(kSource / "tests" / "fixtures" / "golden" / "trace.jsonl");
  const auto dir = scratch("golden");
  const auto r = replay_run("golden", dir);
  c.expect(!golden.empty() && read_file(dir / "trace.jsonl") == golden,
           "trace differs from the golden trace");

  const auto cfg = workflow::load_config(kSource / "configs" / "golden.json");
  const long expected = static_cast<long>(cfg.population) + 5L * (1 + cfg.proposals);
  c.expect(r.state.ledger.queries() == expected,
           "queries " + std::to_string(r.state.ledger.queries()) + " != " +
               std::to_string(expected));
  const auto& h = r.state.history;
  c.expect(std::is_sorted(h.rbegin(), h.rend()), "best-so-far history not monotone");

  const auto plateau_cfg = workflow::load_config(kSource / "configs" / "plateau.json");
  const auto p = replay_run("plateau", scratch("plateau"));
  // The last improvement lands in generation 1.
  int last_improvement = 0;
  for (std::size_t i = 1; i < p.state.history.size(); ++i) {
    if (p.state.history[i - 1] - p.state.history[i] >= plateau_cfg.min_improvement) {
      last_improvement = static_cast<int>(i);
    }
  }
  c.expect(p.state.stop_reason == "plateau" &&
               p.state.generation == last_improvement + plateau_cfg.patience,
           "plateau run stopped at generation " + std::to_string(p.state.generation) + " (" +
               p.state.stop_reason + ")");

  for (int split : {0, 2}) {
    const auto sdir = scratch("split_" + std::to_string(split));
    const auto s = replay_run("golden", sdir, split);
    c.expect(read_file(sdir / "trace.jsonl") == golden && s.best.heuristic.id == r.best.heuristic.id,
             "split run after generation " + std::to_string(split) + " differs");
  }
  if (c.ok) {
    c.detail = "queries=" + std::to_string(r.state.ledger.queries()) + " plateau_stop=" +
               std::to_string(p.state.generation);
  }
  return c;
}

Check parallel_determinism() {
  Check c;
  const auto insts = workflow::load_manifest(kSource / "data/manifests/tsp_train_small.json",
                                             tasks::TaskKind::kTsp);
  const auto train = eval::make_training_set(tasks::TaskKind::kTsp, insts);
  std::vector<Heuristic> batch;
  for (const auto& e : fs::directory_iterator(kSource / "tests" / "fixtures" / "guest")) {
    const auto name = e.path().stem().string();
    if (name.rfind("tsp_", 0) != 0 || name == "tsp_hang") continue;
    Heuristic h;
    h.id = name;
    h.source = read_file(e.path());
    batch.push_back(h);
  }
  std::sort(batch.begin(), batch.end(),
            [](const Heuristic& a, const Heuristic& b) { return a.id < b.id; });
  const std::string nearest = read_file(kSource / "tests/fixtures/guest/tsp_nearest.py");
  for (int i = 0; i < 8; ++i) {
    Heuristic h;
    h.id = "variant" + std::to_string(i);
    h.source = "# stub-policy: tsp.weighted near=1 dest=" + fmt("%.2f", 0.1 * i) +
               " lookahead=" + fmt("%.2f", 0.25 * (i % 3)) + "\n" + nearest;
    batch.push_back(h);
  }
  const eval::RunnerCommand runner{workflow::default_runner_argv()};
  const auto bulk = behavior::default_bulk_ops();
  auto run = [&](int n_proc) {
    eval::EvalLimits l;
    l.timeout_seconds = 20;
    l.n_proc = n_proc;
    return eval::evaluate_batch(batch, train, l, runner, bulk);
  };
  const auto a = run(1);
  const auto b = run(12);
  c.expect(a.evaluated.size() == b.evaluated.size() && !a.evaluated.empty(),
           "evaluated counts differ");
  for (std::size_t i = 0; c.ok && i < a.evaluated.size(); ++i) {
    const auto& x = a.evaluated[i];
    const auto& y = b.evaluated[i];
    bool same = x.candidate.heuristic.id == y.candidate.heuristic.id &&
                x.candidate.loss() == y.candidate.loss() &&
                x.candidate.behavior_raw == y.candidate.behavior_raw &&
                x.trace.runs.size() == y.trace.runs.size();
    for (std::size_t k = 0; same && k < x.trace.runs.size(); ++k) {
      same = x.trace.runs[k].decisions == y.trace.runs[k].decisions &&
             x.trace.runs[k].objective == y.trace.runs[k].objective;
    }
    c.expect(same, "candidate " + x.candidate.heuristic.id + " differs");
  }
  c.expect(a.failures.size() == b.failures.size(), "failure counts differ");
  for (std::size_t i = 0; c.ok && i < a.failures.size(); ++i) {
    c.expect(a.failures[i].heuristic_id == b.failures[i].heuristic_id &&
                 a.failures[i].category == b.failures[i].category,
             "failure " + a.failures[i].heuristic_id + " differs");
  }
  if (c.ok) {
    c.detail = std::to_string(a.evaluated.size()) + " evaluated, " +
               std::to_string(a.failures.size()) + " failed";
  }
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;
    Check (*fn)();
  };
  const Criterion criteria[] = {
      {"gap_formula", 1, gap_formula},
      {"bpp_baselines", 30, bpp_baselines},
      {"l2_soundness", 60, l2_soundness},
      {"pfsp_oracle", 60, pfsp_oracle},
      {"mkp_oracle", 60, mkp_oracle},
      {"archive_properties", 60, archive_properties},
      {"end_to_end_replay", 120, end_to_end},
      {"parallel_determinism", 60, parallel_determinism},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.fn();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.ok && secs > cr.limit_seconds) {
      c.ok = false;
      c.detail = "took " + fmt("%.1f", secs) + " s, limit " + fmt("%.0f", cr.limit_seconds) + " s";
    }
    std::printf("%s %s (%.2f s) %s\n", c.ok ? "PASS" : "FAIL", cr.name, secs, c.detail.c_str());
    failed += c.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
