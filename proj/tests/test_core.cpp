// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "evoheur/core.hpp"
#include "evoheur/errors.hpp"
#include "evoheur/rng.hpp"
#include "evoheur/tasks.hpp"
#include "test_util.hpp"

namespace evoheur {
namespace {

using test::candidate;

TEST(RelativeGap, PrintedRoundedInputs) {
  const double g = relative_gap({10.698, Direction::kMinimize}, 10.679);
  EXPECT_NEAR(g, 0.178, 0.005);
}

TEST(RelativeGap, Identity) { EXPECT_EQ(relative_gap({437, Direction::kMinimize}, 437), 0.0); }

TEST(RelativeGap, LargeTourRow) {
  EXPECT_NEAR(relative_gap({114421, Direction::kMinimize}, 106992), 6.944, 0.001);
}

TEST(RelativeGap, MaximizeUsesAbsoluteDifference) {
  EXPECT_NEAR(relative_gap({90, Direction::kMaximize}, 100), 10.0, 1e-12);
}

TEST(RelativeGap, RejectsZeroAndNonFiniteReference) {
  EXPECT_THROW(relative_gap({1, Direction::kMinimize}, 0), DomainError);
  EXPECT_THROW(relative_gap({1, Direction::kMinimize}, std::nan("")), DomainError);
  EXPECT_THROW(relative_gap({1, Direction::kMinimize},
                            std::numeric_limits<double>::infinity()),
               DomainError);
}

TEST(AggregateFitness, Mean) {
  const std::vector<double> l{0.01, 0.02, 0.03};
  EXPECT_NEAR(aggregate_fitness(l).loss, 0.02, 1e-15);
}

TEST(AggregateFitness, Singleton) {
  const std::vector<double> l{0.5};
  EXPECT_EQ(aggregate_fitness(l).loss, 0.5);
}

TEST(AggregateFitness, Errors) {
  EXPECT_THROW(aggregate_fitness(std::vector<double>{}), EvaluationFailedError);
  EXPECT_THROW(aggregate_fitness(std::vector<double>{-0.1}), DomainError);
  EXPECT_THROW(aggregate_fitness(std::vector<double>{std::nan("")}), DomainError);
}

TEST(AggregateFitness, TenSeededTourGapsMatchManualMean) {
  std::vector<double> losses;
  double manual = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto inst = std::get<tasks::TspInstance>(
        tasks::generate_instance(tasks::TaskKind::kTsp, {.size = 9}, s));
    const double opt = tasks::tsp_exact_length(inst);
    const double nn = tasks::tour_length(inst, tasks::nearest_neighbor_tour(inst));
    const double gap = relative_gap({nn, Direction::kMinimize}, opt);
    losses.push_back(gap / 100.0);
    manual += (nn - opt) / opt;
  }
  EXPECT_NEAR(aggregate_fitness(losses).loss, manual / 10.0, 1e-12);
}

TEST(TopNSelect, KeepsBestTwo) {
  Population p;
  p.capacity = 2;
  p.members = {candidate("a", 0.3), candidate("b", 0.5)};
  const std::vector<EvaluatedCandidate> q{candidate("c", 0.4)};
  const auto out = top_n_select(p, q);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.members[0].heuristic.id, "a");
  EXPECT_EQ(out.members[1].heuristic.id, "c");
}

TEST(TopNSelect, EmptyPopulation) {
  Population p;
  const std::vector<EvaluatedCandidate> q{candidate("x", 0.9)};
  const auto out = top_n_select(p, q);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.members[0].heuristic.id, "x");
}

TEST(TopNSelect, RejectsUnevaluatedNewcomer) {
  Population p;
  EvaluatedCandidate c = candidate("x", 0.1);
  c.fitness.reset();
  const std::vector<EvaluatedCandidate> q{c};
  EXPECT_THROW(top_n_select(p, q), ContractError);
}

// Property: the result equals sorting the union and truncating; it is
// sorted, duplicate-free and never larger than the capacity.
TEST(TopNSelect, MatchesSortOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Population p;
    p.capacity = 10;
    std::vector<EvaluatedCandidate> all;
    for (int i = 0; i < 15; ++i) {
      // Coarse losses force ties.
      const double loss = static_cast<double>(rng.uniform_int(0, 8)) / 8.0;
      auto c = candidate("c" + std::to_string(trial) + "_" + std::to_string(i), loss, {},
                         static_cast<int>(rng.uniform_int(0, 3)));
      all.push_back(c);
    }
    const int split = static_cast<int>(rng.uniform_int(0, 10));
    std::vector<EvaluatedCandidate> cur(all.begin(), all.begin() + split);
    std::sort(cur.begin(), cur.end(), fitter);
    p.members = cur;
    const std::vector<EvaluatedCandidate> q(all.begin() + split, all.end());
    const auto out = top_n_select(p, q);

    auto oracle = all;
    std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
      if (a.loss() != b.loss()) return a.loss() < b.loss();
      if (a.heuristic.generation != b.heuristic.generation) {
        return a.heuristic.generation < b.heuristic.generation;
      }
      return a.heuristic.id < b.heuristic.id;
    });
    oracle.resize(10);
    ASSERT_EQ(out.size(), 10u);
    for (int i = 0; i < 10; ++i) {
      EXPECT_EQ(out.members[i].heuristic.id, oracle[i].heuristic.id);
      if (i > 0) {
        EXPECT_LE(out.members[i - 1].loss(), out.members[i].loss());
      }
    }
  }
}

TEST(TopNSelect, DuplicateIdsKeepFirst) {
  Population p;
  p.capacity = 3;
  p.members = {candidate("a", 0.3)};
  const std::vector<EvaluatedCandidate> q{candidate("a", 0.1), candidate("b", 0.2)};
  const auto out = top_n_select(p, q);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.members[0].heuristic.id, "b");
  EXPECT_EQ(out.members[1].heuristic.id, "a");
  EXPECT_EQ(out.members[1].loss(), 0.3);
}

TEST(CompositeScore, AllBest) { EXPECT_EQ(composite_score(0, 0, 0), 0.0); }

TEST(CompositeScore, Weights) { EXPECT_NEAR(composite_score(0.5, 0.2, 0.3), 1.4, 1e-12); }

TEST(CompositeScore, RejectsUnnormalizedInput) {
  EXPECT_THROW(composite_score(1.5, 0, 0), DomainError);
}

TEST(MinmaxNormalize, ScalesAndHandlesConstantColumn) {
  const std::vector<double> col{2, 4, 6};
  const auto n = minmax_normalize(col);
  EXPECT_EQ(n, (std::vector<double>{0, 0.5, 1}));
  const std::vector<double> flat{3, 3};
  EXPECT_EQ(minmax_normalize(flat), (std::vector<double>{0, 0}));
}

TEST(EvaluatedCandidate, LossRequiresFitness) {
  EvaluatedCandidate c;
  EXPECT_THROW(c.loss(), ContractError);
}

}  // namespace
}  // namespace evoheur
