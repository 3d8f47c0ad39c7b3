// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared value types and the scoring primitives every other module builds
// on: the relative-gap metric, per-instance loss aggregation, elite
// selection and the ablation composite score.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evoheur {

enum class Direction { kMinimize, kMaximize };

struct ObjectiveValue {
  double value = 0.0;
  Direction direction = Direction::kMinimize;
};

// Mean per-instance loss. Lower is better for every task.
struct FitnessScore {
  double loss = 0.0;

  friend bool operator==(const FitnessScore&, const FitnessScore&) = default;
};

struct Heuristic {
  std::string id;
  std::string source;
  std::string strategy_text;
  std::vector<std::string> parent_ids;
  int generation = 0;
};

struct EvaluatedCandidate {
  Heuristic heuristic;
  std::optional<FitnessScore> fitness;
  std::vector<double> behavior_raw;
  std::vector<double> behavior_norm;
  double eval_seconds = 0.0;
  long tokens_in = 0;
  long tokens_out = 0;

  bool evaluated() const { return fitness.has_value() && !behavior_norm.empty(); }
  // Throws ContractError when the candidate has no fitness yet.
  double loss() const;
};

struct Population {
  std::vector<EvaluatedCandidate> members;
  int capacity = 10;

  bool empty() const { return members.empty(); }
  std::size_t size() const { return members.size(); }
};

// |value - reference| / |reference| * 100. Throws DomainError on a zero or
// non-finite reference.
double relative_gap(const ObjectiveValue& obj, double reference);

// Arithmetic mean. Throws EvaluationFailedError on an empty list and
// DomainError on negative or non-finite losses.
FitnessScore aggregate_fitness(std::span<const double> losses);

// Strict weak order used for every fitness ranking: loss, then earlier
// generation, then lexicographic id.
bool fitter(const EvaluatedCandidate& a, const EvaluatedCandidate& b);

// The `current.capacity` fittest members of current ∪ newcomers, sorted by
// `fitter`. Duplicate ids keep their first occurrence (current first).
Population top_n_select(const Population& current,
                        std::span<const EvaluatedCandidate> newcomers);

// obj + 3 * token + time, all inputs already min-max normalized to [0, 1].
double composite_score(double obj_norm, double token_norm, double time_norm);

// Min-max normalizes one column of a block; a constant column maps to 0.
std::vector<double> minmax_normalize(std::span<const double> column);

}  // namespace evoheur
