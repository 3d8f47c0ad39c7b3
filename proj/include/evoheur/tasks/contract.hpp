// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-step decision contracts. A heuristic never builds a full solution; a
// driver loop asks it for one decision at a time and the host replays the
// resulting decision log to check it and compute the objective.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "evoheur/tasks.hpp"

namespace evoheur::tasks {

struct TaskContract {
  TaskKind kind;
  std::string entry_point;
  std::vector<std::string> params;
  std::string description;  // problem statement for prompts
  std::string returns;      // what the entry point must return

  // "name(a, b, c)"
  std::string signature() const;
};

const TaskContract& task_contract(TaskKind kind);

// Decision encodings:
//   tsp  - next city id (tour starts at city 0, n - 1 decisions)
//   bpp  - bin index per item; index == open bins means "new bin"
//   pfsp - next job id (n decisions)
//   mkp  - admitted item id, in admission order
class DecisionPolicy {
 public:
  virtual ~DecisionPolicy() = default;

  virtual int select_next_node(int current, int destination, std::span<const int> unvisited,
                               const TspInstance& inst);
  // One score per feasible bin (residual capacities in bin order).
  virtual std::vector<double> bin_priority(int item, std::span<const int> feasible_residuals,
                                           const BppInstance& inst);
  // One score per unscheduled job; `completion` holds per-machine completion times.
  virtual std::vector<double> job_priority(std::span<const int> completion,
                                           std::span<const int> unscheduled,
                                           const PfspInstance& inst);
  // One score per feasible candidate item.
  virtual std::vector<double> item_priority(std::span<const long> remaining,
                                            std::span<const int> candidates,
                                            const MkpInstance& inst);
};

// Runs the task's decision loop. Contract violations throw
// InfeasibleDecisionError; exceptions from the policy propagate.
std::vector<int> drive(const Instance& inst, DecisionPolicy& policy);

struct Replay {
  Solution solution;
  ObjectiveValue objective;
  int steps = 0;
};

// Re-executes a decision log, enforcing the same contract as `drive`.
Replay replay_decisions(const Instance& inst, std::span<const int> decisions);

// Index of the first maximum; throws InfeasibleDecisionError on a wrong
// length or NaN score.
int argmax_first(std::span<const double> scores, std::size_t expected, int step);

}  // namespace evoheur::tasks
