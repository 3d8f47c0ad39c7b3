// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "evoheur/errors.hpp"

namespace evoheur {

double EvaluatedCandidate::loss() const {
  if (!fitness) {
    throw ContractError("candidate '" + heuristic.id + "' has no fitness");
  }
  return fitness->loss;
}

double relative_gap(const ObjectiveValue& obj, double reference) {
  if (!std::isfinite(reference) || reference == 0.0) {
    throw DomainError("relative_gap: reference must be finite and non-zero");
  }
  if (!std::isfinite(obj.value)) {
    throw DomainError("relative_gap: objective must be finite");
  }
  return std::abs(obj.value - reference) / std::abs(reference) * 100.0;
}

FitnessScore aggregate_fitness(std::span<const double> losses) {
  if (losses.empty()) {
    throw EvaluationFailedError("aggregate_fitness: no per-instance losses");
  }
  double sum = 0.0;
  for (double l : losses) {
    if (!std::isfinite(l) || l < 0.0) {
      throw DomainError("aggregate_fitness: losses must be finite and >= 0");
    }
    sum += l;
  }
  return FitnessScore{sum / static_cast<double>(losses.size())};
}

bool fitter(const EvaluatedCandidate& a, const EvaluatedCandidate& b) {
  const double la = a.loss();
  const double lb = b.loss();
  if (la != lb) return la < lb;
  if (a.heuristic.generation != b.heuristic.generation) {
    return a.heuristic.generation < b.heuristic.generation;
  }
  return a.heuristic.id < b.heuristic.id;
}

Population top_n_select(const Population& current,
                        std::span<const EvaluatedCandidate> newcomers) {
  if (current.capacity < 1) {
    throw ContractError("top_n_select: capacity must be >= 1");
  }
  std::vector<EvaluatedCandidate> pool;
  pool.reserve(current.members.size() + newcomers.size());
  std::unordered_set<std::string> seen;
  auto add = [&](const EvaluatedCandidate& c) {
    if (!c.fitness) throw ContractError("top_n_select: candidate '" + c.heuristic.id +
                                        "' has no fitness");
    if (seen.insert(c.heuristic.id).second) pool.push_back(c);
  };
  for (const auto& c : current.members) add(c);
  for (const auto& c : newcomers) add(c);

  std::stable_sort(pool.begin(), pool.end(), fitter);
  if (pool.size() > static_cast<std::size_t>(current.capacity)) {
    pool.resize(static_cast<std::size_t>(current.capacity));
  }
  return Population{std::move(pool), current.capacity};
}

double composite_score(double obj_norm, double token_norm, double time_norm) {
  for (double v : {obj_norm, token_norm, time_norm}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("composite_score: inputs must lie in [0, 1]");
    }
  }
  return obj_norm + 3.0 * token_norm + time_norm;
}

std::vector<double> minmax_normalize(std::span<const double> column) {
  std::vector<double> out(column.size(), 0.0);
  if (column.empty()) return out;
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < column.size(); ++i) {
    out[i] = (column[i] - *lo) / range;
  }
  return out;
}

}  // namespace evoheur
