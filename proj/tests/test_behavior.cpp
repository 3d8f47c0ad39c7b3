// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include <gtest/gtest.h>

#include "evoheur/behavior.hpp"
#include "evoheur/errors.hpp"
#include "evoheur/rng.hpp"
#include "evoheur/stub_runner.hpp"
#include "evoheur/tasks/contract.hpp"
#include "test_util.hpp"

namespace evoheur::behavior {
namespace {

using tasks::TaskKind;

int index_of(TaskKind kind, const std::string& name) {
  const auto names = coordinate_names(kind);
  return static_cast<int>(std::find(names.begin(), names.end(), name) - names.begin());
}

TEST(StaticFeatures, MinimalProgram) {
  const auto f = static_features("def select_next_node(a, b, c, d):\n    return c[0]\n",
                                 "select_next_node");
  EXPECT_EQ(f.control_flow_depth, 1);
  EXPECT_EQ(f.branch_density, 0.0);
  EXPECT_EQ(f.loop_count, 0);
  EXPECT_EQ(f.helper_usage, 0);
}

TEST(StaticFeatures, LoopWithConditionalFixture) {
  const auto src = test::read_file(test::fixture("guest/loop_branch.py"));
  const auto f = static_features(src, "select_next_node");
  EXPECT_EQ(f.control_flow_depth, 3);
  EXPECT_EQ(f.loop_count, 1);
  // def, assignment, for, if, assignment, return: one branch in six statements.
  EXPECT_DOUBLE_EQ(f.branch_density, 1.0 / 6.0);
}

TEST(StaticFeatures, HelpersAndBulkOps) {
  const std::string src =
      "import numpy as np\n"
      "def _score(x):\n"
      "    return x * 2\n"
      "def priority(item, bins):\n"
      "    arr = np.array(bins)\n"
      "    return _score(arr - item)\n";
  const auto f = static_features(src, "priority");
  // One helper defined plus one distinct helper called.
  EXPECT_EQ(f.helper_usage, 2);
  EXPECT_GT(f.vectorization_density, 0.0);
  EXPECT_GT(f.op_complexity, 0.0);
}

TEST(StaticFeatures, Deterministic) {
  const auto src = test::read_file(test::fixture("guest/tsp_nearest.py"));
  EXPECT_EQ(static_features(src, "select_next_node").as_vector(),
            static_features(src, "select_next_node").as_vector());
}

TEST(StaticFeatures, UnparsableSource) {
  EXPECT_THROW(static_features("def f(:\n", "f"), FeatureExtractionError);
}

TEST(RuntimeFeatures, PerfectPacking) {
  tasks::BppInstance b;
  b.capacity = 100;
  b.items = {60, 40, 30, 70, 100};
  const std::vector<int> d{0, 0, 1, 1, 2};
  const auto f = instance_runtime_features(b, d);
  EXPECT_DOUBLE_EQ(f[index_of(TaskKind::kBpp, "fill_ratio")], 1.0);
  EXPECT_DOUBLE_EQ(f[index_of(TaskKind::kBpp, "fragmentation")], 0.0);
}

TEST(RuntimeFeatures, NearestNeighborIsFullyMyopic) {
  const auto t = std::get<tasks::TspInstance>(
      tasks::generate_instance(TaskKind::kTsp, {.size = 15}, 3));
  const auto tour = tasks::nearest_neighbor_tour(t);
  const std::vector<int> d(tour.begin() + 1, tour.end());
  const auto f = instance_runtime_features(t, d);
  EXPECT_DOUBLE_EQ(f[index_of(TaskKind::kTsp, "greedy_myopia")], 1.0);
}

TEST(RuntimeFeatures, BestFitFixtureResidualDispersion) {
  tasks::BppInstance b;
  b.capacity = 100;
  b.items = {60, 40, 30, 70};
  const auto packing = tasks::best_fit(b.items, b.capacity);
  const auto f = instance_runtime_features(b, packing);
  EXPECT_DOUBLE_EQ(f[index_of(TaskKind::kBpp, "residual_dispersion")], 0.0);
}

TEST(RuntimeFeatures, AllFiniteForEveryTask) {
  for (auto kind : {TaskKind::kTsp, TaskKind::kBpp, TaskKind::kMkp, TaskKind::kPfsp}) {
    const auto inst = tasks::generate_instance(
        kind, {.size = 12, .capacity = 100, .constraints = 3, .machines = 3}, 1);
    const std::map<TaskKind, std::string> directive{
        {TaskKind::kTsp, "tsp.weighted"}, {TaskKind::kBpp, "bpp.weighted"},
        {TaskKind::kMkp, "mkp.weighted"}, {TaskKind::kPfsp, "pfsp.neh"}};
    auto policy = sandbox::make_stub_policy({directive.at(kind), {}}, kind);
    std::vector<std::vector<int>> logs{tasks::drive(inst, *policy)};
    const std::vector<tasks::Instance> insts{inst};
    const auto f = runtime_features(kind, insts, logs);
    ASSERT_EQ(f.size(), static_cast<std::size_t>(kRuntimeDims));
    for (double x : f) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(RuntimeFeatures, InfeasibleLog) {
  tasks::BppInstance b;
  b.items = {60, 60};
  EXPECT_THROW(instance_runtime_features(b, std::vector<int>{0, 0}),
               InfeasibleDecisionError);
}

TEST(CoordinateNames, ElevenPerTask) {
  EXPECT_EQ(coordinate_names(TaskKind::kMkp).size(), static_cast<std::size_t>(kDims));
}

NormalizationBounds bounds(std::vector<double> lo, std::vector<double> hi, bool frozen = false) {
  NormalizationBounds b;
  b.min = std::move(lo);
  b.max = std::move(hi);
  b.frozen = frozen;
  return b;
}

TEST(Normalize, MinAndMax) {
  const auto b = bounds({0, 1, 2}, {1, 3, 6});
  EXPECT_EQ(normalize(b.min, b), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(normalize(b.max, b), (std::vector<double>{1, 1, 1}));
}

TEST(Normalize, ClampsAgainstScalarRecomputation) {
  const auto b = bounds({0, 1, 2, 5}, {1, 3, 6, 5}, true);
  const std::vector<double> raw{-1, 2, 9, 7};
  const auto n = normalize(raw, b);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double expect = 0.5;
    if (b.max[i] > b.min[i]) {
      expect = std::clamp((raw[i] - b.min[i]) / (b.max[i] - b.min[i]), 0.0, 1.0);
    }
    EXPECT_DOUBLE_EQ(n[i], expect);
  }
}

TEST(Normalize, Errors) {
  EXPECT_THROW(normalize(std::vector<double>{1}, NormalizationBounds{}), ContractError);
  EXPECT_THROW(normalize(std::vector<double>{1, 2}, bounds({0}, {1})), ContractError);
}

TEST(Bounds, EmptyBatchUnchanged) {
  const auto b = bounds({0}, {1});
  const auto out = update_or_freeze_bounds(b, {}, 1);
  EXPECT_EQ(out.min, b.min);
  EXPECT_EQ(out.max, b.max);
}

TEST(Bounds, GenerationOneExpandsThenFreezes) {
  const std::vector<std::vector<double>> batch{{0.5, 4.0}};
  const auto out = update_or_freeze_bounds(bounds({0, 0}, {1, 1}), batch, 1);
  EXPECT_EQ(out.max, (std::vector<double>{1, 4}));
  EXPECT_TRUE(out.frozen);
}

TEST(Bounds, LaterGenerationsLeaveFrozenBoundsAlone) {
  const auto frozen = bounds({0, 0}, {1, 1}, true);
  const std::vector<std::vector<double>> batch{{-3, 9}};
  const auto out = update_or_freeze_bounds(frozen, batch, 2);
  EXPECT_EQ(out.min, frozen.min);
  EXPECT_EQ(out.max, frozen.max);
  EXPECT_EQ(normalize(batch[0], out), (std::vector<double>{0, 1}));
}

// Property: min <= max per coordinate and frozen bounds never move.
TEST(Bounds, RandomBatchesKeepOrderedBounds) {
  Rng rng(8);
  NormalizationBounds b;
  for (int gen = 0; gen < 6; ++gen) {
    std::vector<std::vector<double>> batch;
    for (int i = 0; i < 3; ++i) {
      batch.push_back({rng.uniform01() * 10 - 5, rng.uniform01()});
    }
    const auto before = b;
    b = update_or_freeze_bounds(b, batch, gen);
    for (std::size_t d = 0; d < b.min.size(); ++d) EXPECT_LE(b.min[d], b.max[d]);
    if (before.frozen) {
      EXPECT_EQ(b.min, before.min);
      EXPECT_EQ(b.max, before.max);
    }
  }
  EXPECT_TRUE(b.frozen);
}

}  // namespace
}  // namespace evoheur::behavior
