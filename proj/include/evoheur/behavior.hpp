// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Behavior descriptors: five task-specific runtime statistics followed by
// six static program-structure features, min-max normalized within a task.

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoheur/tasks.hpp"

namespace evoheur::behavior {

inline constexpr int kRuntimeDims = 5;
inline constexpr int kStaticDims = 6;
inline constexpr int kDims = kRuntimeDims + kStaticDims;

struct StaticFeatures {
  int control_flow_depth = 0;
  double branch_density = 0.0;  // branches / statements
  int loop_count = 0;
  int helper_usage = 0;
  double vectorization_density = 0.0;  // bulk-array calls / (calls + operators)
  double op_complexity = 0.0;          // operators / statements

  std::vector<double> as_vector() const;
};

// Call names treated as bulk-array operations when used as attribute calls
// (np.argmin(...), arr.sum(...)).
std::vector<std::string> default_bulk_ops();

// Throws FeatureExtractionError when the source does not parse.
StaticFeatures static_features(std::string_view source, std::string_view entry_point,
                               std::span<const std::string> bulk_ops);
StaticFeatures static_features(std::string_view source, std::string_view entry_point);

// Statistics of one instance's decision log. Throws InfeasibleDecisionError
// for a log that violates the task contract.
std::vector<double> instance_runtime_features(const tasks::Instance& inst,
                                              std::span<const int> decisions);

// Mean of the per-instance statistics. Throws ContractError when an
// instance is not of `kind`, the spans differ in length, or they are empty.
std::vector<double> runtime_features(tasks::TaskKind kind,
                                     std::span<const tasks::Instance> instances,
                                     std::span<const std::vector<int>> decisions);

// The 11 coordinate names in vector order.
std::vector<std::string> coordinate_names(tasks::TaskKind kind);

// runtime (5) ++ static (6)
std::vector<double> assemble(std::span<const double> runtime, const StaticFeatures& st);

struct NormalizationBounds {
  std::vector<double> min;
  std::vector<double> max;
  bool frozen = false;

  bool initialized() const { return !min.empty(); }
};

// Expands the bounds to cover `batch` during generations 0 and 1 and
// freezes them once generation 1 has been seen. Frozen bounds are returned
// unchanged, as are bounds given an empty batch. Bounds that were never
// initialized are seeded from the batch regardless of generation.
NormalizationBounds update_or_freeze_bounds(NormalizationBounds b,
                                            std::span<const std::vector<double>> batch,
                                            int generation);

// (x - min) / (max - min) clamped to [0, 1]; a degenerate coordinate maps
// to 0.5. Throws ContractError on uninitialized bounds or a length mismatch.
std::vector<double> normalize(std::span<const double> raw, const NormalizationBounds& b);

}  // namespace evoheur::behavior
