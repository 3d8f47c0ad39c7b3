// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/tasks/contract.hpp"

#include <algorithm>
#include <cmath>

namespace evoheur::tasks {
namespace {

const TaskContract kTsp{
    TaskKind::kTsp,
    "select_next_node",
    {"current_node", "destination_node", "unvisited_nodes", "distance_matrix"},
    "Traveling salesman, constructive. The tour starts at node 0 and is built one "
    "city at a time. At each step choose the next city to visit from the unvisited "
    "nodes; after the last city the tour returns to node 0. Objective: minimize the "
    "total tour length.",
    "one element of unvisited_nodes"};

const TaskContract kBpp{
    TaskKind::kBpp,
    "priority",
    {"item", "bins"},
    "Online one-dimensional bin packing. Items arrive one at a time and must be placed "
    "immediately. bins holds the remaining capacities of the open bins the item fits "
    "into. The item goes to the bin with the highest score (ties: the earliest bin); a "
    "new bin is opened only when no open bin fits. Objective: minimize the number of "
    "bins used.",
    "a sequence of scores, one per entry of bins"};

const TaskContract kPfsp{
    TaskKind::kPfsp,
    "job_priority",
    {"current_completion", "unscheduled_jobs", "processing_times"},
    "Permutation flow shop scheduling. Every job visits the machines in the same "
    "order. The schedule is built by appending one job at a time; current_completion "
    "holds the completion time of each machine for the jobs placed so far and "
    "processing_times[j][k] is the time of job j on machine k. The job with the highest "
    "priority is appended next (ties: the first listed job). Objective: minimize the "
    "makespan.",
    "a sequence of priorities, one per entry of unscheduled_jobs"};

const TaskContract kMkp{
    TaskKind::kMkp,
    "item_priority",
    {"remaining_capacity", "candidate_items", "values", "weights"},
    "Multidimensional 0-1 knapsack. Items are admitted one at a time. "
    "remaining_capacity holds the unused capacity of every constraint, candidate_items "
    "lists the items that still fit, values[j] is the value of item j and weights[i][j] "
    "its weight in constraint i. The candidate with the highest priority is admitted "
    "(ties: the first listed item); construction stops when no item fits. Objective: "
    "maximize the total value.",
    "a sequence of priorities, one per entry of candidate_items"};

void check_unvisited(int choice, std::span<const int> unvisited, int step) {
  if (std::find(unvisited.begin(), unvisited.end(), choice) == unvisited.end()) {
    throw InfeasibleDecisionError("node " + std::to_string(choice) + " is not unvisited", step);
  }
}

std::vector<int> fitting_items(const MkpInstance& inst, std::span<const char> taken,
                               std::span<const long> room) {
  std::vector<int> out;
  for (int j = 0; j < inst.items(); ++j) {
    if (taken[j]) continue;
    bool fits = true;
    for (int c = 0; c < inst.constraints() && fits; ++c) fits = inst.weights[c][j] <= room[c];
    if (fits) out.push_back(j);
  }
  return out;
}

void advance_completion(const PfspInstance& inst, int job, std::vector<int>& completion) {
  const auto& p = inst.ptimes[job];
  completion[0] += p[0];
  for (std::size_t k = 1; k < completion.size(); ++k) {
    completion[k] = std::max(completion[k], completion[k - 1]) + p[k];
  }
}

}  // namespace

std::string TaskContract::signature() const {
  std::string s = entry_point + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += ", ";
    s += params[i];
  }
  return s + ")";
}

const TaskContract& task_contract(TaskKind kind) {
  switch (kind) {
    case TaskKind::kTsp: return kTsp;
    case TaskKind::kBpp: return kBpp;
    case TaskKind::kPfsp: return kPfsp;
    case TaskKind::kMkp: return kMkp;
  }
  throw ContractError("unknown task kind");
}

int DecisionPolicy::select_next_node(int, int, std::span<const int>, const TspInstance&) {
  throw ContractError("policy does not implement tsp_construct");
}
std::vector<double> DecisionPolicy::bin_priority(int, std::span<const int>, const BppInstance&) {
  throw ContractError("policy does not implement bpp_online");
}
std::vector<double> DecisionPolicy::job_priority(std::span<const int>, std::span<const int>,
                                                 const PfspInstance&) {
  throw ContractError("policy does not implement pfsp");
}
std::vector<double> DecisionPolicy::item_priority(std::span<const long>, std::span<const int>,
                                                  const MkpInstance&) {
  throw ContractError("policy does not implement mkp");
}

int argmax_first(std::span<const double> scores, std::size_t expected, int step) {
  if (scores.size() != expected) {
    throw InfeasibleDecisionError("expected " + std::to_string(expected) + " scores, got " +
                                      std::to_string(scores.size()),
                                  step);
  }
  int best = -1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw InfeasibleDecisionError("score is NaN", step);
    if (best < 0 || scores[i] > scores[best]) best = static_cast<int>(i);
  }
  return best;
}

std::vector<int> drive(const Instance& instance, DecisionPolicy& policy) {
  std::vector<int> decisions;
  switch (kind_of(instance)) {
    case TaskKind::kTsp: {
      const auto& inst = std::get<TspInstance>(instance);
      std::vector<int> unvisited;
      for (int i = 1; i < inst.size(); ++i) unvisited.push_back(i);
      int current = 0;
      while (!unvisited.empty()) {
        const int step = static_cast<int>(decisions.size());
        const int choice = policy.select_next_node(current, 0, unvisited, inst);
        check_unvisited(choice, unvisited, step);
        unvisited.erase(std::find(unvisited.begin(), unvisited.end(), choice));
        decisions.push_back(choice);
        current = choice;
      }
      break;
    }
    case TaskKind::kBpp: {
      const auto& inst = std::get<BppInstance>(instance);
      std::vector<int> residual;
      for (int item : inst.items) {
        const int step = static_cast<int>(decisions.size());
        if (item > inst.capacity) throw InfeasibleDecisionError("item exceeds capacity", step);
        std::vector<int> feasible_idx, feasible_res;
        for (int b = 0; b < static_cast<int>(residual.size()); ++b) {
          if (residual[b] >= item) {
            feasible_idx.push_back(b);
            feasible_res.push_back(residual[b]);
          }
        }
        int bin;
        if (feasible_idx.empty()) {
          bin = static_cast<int>(residual.size());
          residual.push_back(inst.capacity);
        } else {
          const auto scores = policy.bin_priority(item, feasible_res, inst);
          bin = feasible_idx[argmax_first(scores, feasible_res.size(), step)];
        }
        residual[bin] -= item;
        decisions.push_back(bin);
      }
      break;
    }
    case TaskKind::kPfsp: {
      const auto& inst = std::get<PfspInstance>(instance);
      std::vector<int> completion(inst.machines(), 0);
      std::vector<int> unscheduled(inst.jobs());
      for (int j = 0; j < inst.jobs(); ++j) unscheduled[j] = j;
      while (!unscheduled.empty()) {
        const int step = static_cast<int>(decisions.size());
        const auto scores = policy.job_priority(completion, unscheduled, inst);
        const int pick = argmax_first(scores, unscheduled.size(), step);
        const int job = unscheduled[pick];
        advance_completion(inst, job, completion);
        unscheduled.erase(unscheduled.begin() + pick);
        decisions.push_back(job);
      }
      break;
    }
    case TaskKind::kMkp: {
      const auto& inst = std::get<MkpInstance>(instance);
      std::vector<long> room(inst.capacities.begin(), inst.capacities.end());
      std::vector<char> taken(inst.items(), 0);
      for (;;) {
        const auto candidates = fitting_items(inst, taken, room);
        if (candidates.empty()) break;
        const int step = static_cast<int>(decisions.size());
        const auto scores = policy.item_priority(room, candidates, inst);
        const int item = candidates[argmax_first(scores, candidates.size(), step)];
        taken[item] = 1;
        for (int c = 0; c < inst.constraints(); ++c) room[c] -= inst.weights[c][item];
        decisions.push_back(item);
      }
      break;
    }
  }
  return decisions;
}

Replay replay_decisions(const Instance& instance, std::span<const int> decisions) {
  Replay out;
  out.steps = static_cast<int>(decisions.size());
  switch (kind_of(instance)) {
    case TaskKind::kTsp: {
      const auto& inst = std::get<TspInstance>(instance);
      std::vector<char> visited(inst.size(), 0);
      Tour tour{{0}};
      visited[0] = 1;
      for (std::size_t s = 0; s < decisions.size(); ++s) {
        const int c = decisions[s];
        if (c < 0 || c >= inst.size() || visited[c]) {
          throw InfeasibleDecisionError("node " + std::to_string(c) + " is not unvisited",
                                        static_cast<int>(s));
        }
        visited[c] = 1;
        tour.order.push_back(c);
      }
      if (static_cast<int>(tour.order.size()) != inst.size()) {
        throw InfeasibleDecisionError("tour stopped early", out.steps);
      }
      out.solution = tour;
      break;
    }
    case TaskKind::kBpp: {
      const auto& inst = std::get<BppInstance>(instance);
      if (decisions.size() > inst.items.size()) {
        throw InfeasibleDecisionError("more decisions than items",
                                      static_cast<int>(inst.items.size()));
      }
      std::vector<int> residual;
      Packing packing;
      for (std::size_t s = 0; s < decisions.size(); ++s) {
        const int item = inst.items[s];
        const int b = decisions[s];
        const int open = static_cast<int>(residual.size());
        const bool any_fits = std::any_of(residual.begin(), residual.end(),
                                          [&](int r) { return r >= item; });
        if (b == open) {
          if (any_fits) {
            throw InfeasibleDecisionError("new bin opened while an open bin fits",
                                          static_cast<int>(s));
          }
          residual.push_back(inst.capacity);
        } else if (b < 0 || b > open || residual[b] < item) {
          throw InfeasibleDecisionError("bin " + std::to_string(b) + " cannot take the item",
                                        static_cast<int>(s));
        }
        residual[b] -= item;
        packing.bin_of_item.push_back(b);
      }
      if (decisions.size() != inst.items.size()) {
        throw InfeasibleDecisionError("packing stopped early", out.steps);
      }
      out.solution = packing;
      break;
    }
    case TaskKind::kPfsp: {
      const auto& inst = std::get<PfspInstance>(instance);
      std::vector<char> placed(inst.jobs(), 0);
      Schedule sched;
      for (std::size_t s = 0; s < decisions.size(); ++s) {
        const int j = decisions[s];
        if (j < 0 || j >= inst.jobs() || placed[j]) {
          throw InfeasibleDecisionError("job " + std::to_string(j) + " is not unscheduled",
                                        static_cast<int>(s));
        }
        placed[j] = 1;
        sched.jobs.push_back(j);
      }
      if (static_cast<int>(sched.jobs.size()) != inst.jobs()) {
        throw InfeasibleDecisionError("schedule stopped early", out.steps);
      }
      out.solution = sched;
      break;
    }
    case TaskKind::kMkp: {
      const auto& inst = std::get<MkpInstance>(instance);
      std::vector<long> room(inst.capacities.begin(), inst.capacities.end());
      std::vector<char> taken(inst.items(), 0);
      Selection sel;
      for (std::size_t s = 0; s < decisions.size(); ++s) {
        const int j = decisions[s];
        bool ok = j >= 0 && j < inst.items() && !taken[j];
        for (int c = 0; ok && c < inst.constraints(); ++c) ok = inst.weights[c][j] <= room[c];
        if (!ok) {
          throw InfeasibleDecisionError("item " + std::to_string(j) + " is not a candidate",
                                        static_cast<int>(s));
        }
        taken[j] = 1;
        for (int c = 0; c < inst.constraints(); ++c) room[c] -= inst.weights[c][j];
        sel.items.push_back(j);
      }
      if (!fitting_items(inst, taken, room).empty()) {
        throw InfeasibleDecisionError("stopped while an item still fits", out.steps);
      }
      out.solution = sel;
      break;
    }
  }
  out.objective = evaluate_solution(instance, out.solution);
  return out;
}

}  // namespace evoheur::tasks
