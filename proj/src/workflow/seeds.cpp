// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/workflow.hpp"

namespace evoheur::workflow {
namespace {

constexpr const char* kTspNearest = R"(# stub-policy: tsp.weighted near=1
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
)";

constexpr const char* kBppBestFit = R"(# stub-policy: bpp.weighted fit=1
# Best fit: prefer the feasible bin that is left with the least room.
def priority(item, bins):
    return [-(capacity - item) for capacity in bins]
)";

constexpr const char* kPfspNeh = R"(# stub-policy: pfsp.neh
# NEH order: insert jobs by descending total work at their best position,
# then schedule jobs in the resulting order.
def _makespan(sequence, processing_times):
    machines = len(processing_times)
    finish = [0] * machines
    for job in sequence:
        for m in range(machines):
            start = finish[m] if m == 0 else max(finish[m], finish[m - 1])
            finish[m] = start + processing_times[m][job]
    return finish[-1]


def _neh(processing_times):
    jobs = list(range(len(processing_times[0])))
    total = [sum(row[j] for row in processing_times) for j in jobs]
    order = sorted(jobs, key=lambda j: -total[j])
    sequence = []
    for job in order:
        best_seq = None
        best_span = None
        for pos in range(len(sequence) + 1):
            trial = sequence[:pos] + [job] + sequence[pos:]
            span = _makespan(trial, processing_times)
            if best_span is None or span < best_span:
                best_seq = trial
                best_span = span
        sequence = best_seq
    return sequence


_POSITION = {}


def job_priority(current_completion, unscheduled_jobs, processing_times):
    if not _POSITION:
        for i, job in enumerate(_neh(processing_times)):
            _POSITION[job] = i
    position = _POSITION
    return [-position[j] for j in unscheduled_jobs]
)";

constexpr const char* kMkpDensity = R"(# stub-policy: mkp.weighted density=1
# Greedy density: value over capacity-normalized total weight. The first
# call of an instance sees the full capacities.
_CAPACITY = []


def item_priority(remaining_capacity, candidate_items, values, weights):
    if not _CAPACITY:
        _CAPACITY.extend(remaining_capacity)
    scores = []
    for j in candidate_items:
        load = 0.0
        for c in range(len(weights)):
            load += weights[c][j] / _CAPACITY[c]
        scores.append(values[j] / load if load > 0 else float("inf"))
    return scores
)";

}  // namespace

Heuristic builtin_seed(tasks::TaskKind kind) {
  Heuristic h;
  h.id = "g000-builtin";
  h.generation = 0;
  switch (kind) {
    case tasks::TaskKind::kTsp:
      h.source = kTspNearest;
      h.strategy_text = "Nearest neighbor: always move to the closest unvisited city.";
      break;
    case tasks::TaskKind::kBpp:
      h.source = kBppBestFit;
      h.strategy_text = "Best fit: place each item in the feasible bin with the least room left.";
      break;
    case tasks::TaskKind::kPfsp:
      h.source = kPfspNeh;
      h.strategy_text = "NEH order: schedule jobs in the order built by NEH insertion.";
      break;
    case tasks::TaskKind::kMkp:
      h.source = kMkpDensity;
      h.strategy_text =
          "Greedy density: admit the item with the best value per normalized weight.";
      break;
  }
  return h;
}

}  // namespace evoheur::workflow
