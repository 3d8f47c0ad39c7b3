// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "evoheur/archive.hpp"
#include "evoheur/errors.hpp"
#include "evoheur/rng.hpp"
#include "test_util.hpp"

namespace evoheur::archive {
namespace {

using test::candidate;

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

int brute_cell(const std::vector<double>& v, const CentroidSet& cs) {
  int best = 0;
  for (int i = 1; i < cs.count(); ++i) {
    if (dist2(v, cs.centroids[i]) < dist2(v, cs.centroids[best])) best = i;
  }
  return best;
}

std::vector<double> random_point(Rng& rng, int dim) {
  std::vector<double> v(dim);
  for (auto& x : v) x = rng.uniform01();
  return v;
}

void expect_invariants(const Archive& a) {
  EXPECT_LE(a.occupied(), std::min(a.capacity(), a.centroids().count()));
  for (const auto& [cell, inc] : a.cells()) {
    EXPECT_EQ(brute_cell(inc.behavior_norm, a.centroids()), cell);
    for (double x : inc.behavior_norm) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(Centroids, SingleCentroidNearHalf) {
  for (std::uint64_t s : {0u, 1u, 99u}) {
    const auto cs = build_centroids(1, 1, s);
    ASSERT_EQ(cs.count(), 1);
    EXPECT_NEAR(cs.centroids[0][0], 0.5, 0.02);
  }
}

TEST(Centroids, Deterministic) {
  const auto a = build_centroids(2, 4, 7);
  const auto b = build_centroids(2, 4, 7);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(Centroids, DistinctAndInRange) {
  const auto cs = build_centroids(11, 25, 0);
  ASSERT_EQ(cs.count(), 25);
  for (int i = 0; i < 25; ++i) {
    for (double x : cs.centroids[i]) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
    for (int j = i + 1; j < 25; ++j) EXPECT_GT(dist2(cs.centroids[i], cs.centroids[j]), 0.0);
  }
}

TEST(AssignCell, Identity) {
  const auto cs = build_centroids(11, 25, 3);
  EXPECT_EQ(assign_cell(cs.centroids[7], cs), 7);
}

TEST(AssignCell, OneDimensional) {
  CentroidSet cs;
  cs.dim = 1;
  cs.centroids = {{0.2}, {0.8}};
  const std::vector<double> v{0.4};
  EXPECT_EQ(assign_cell(v, cs), 0);
}

TEST(AssignCell, MatchesBruteForce) {
  Rng rng(1);
  CentroidSet cs;
  cs.dim = 11;
  for (int i = 0; i < 25; ++i) cs.centroids.push_back(random_point(rng, 11));
  for (int i = 0; i < 100; ++i) {
    const auto v = random_point(rng, 11);
    EXPECT_EQ(assign_cell(v, cs), brute_cell(v, cs));
  }
}

TEST(AssignCell, DimensionMismatch) {
  const auto cs = build_centroids(2, 3, 0);
  EXPECT_THROW(assign_cell(std::vector<double>{0.5}, cs), DomainError);
}

class ArchiveTest : public ::testing::Test {
 protected:
  ArchiveTest() : cs_(build_centroids(2, 6, 4)), a_(cs_, 25) {}
  EvaluatedCandidate at_cell(const std::string& id, double loss, int cell) {
    return candidate(id, loss, cs_.centroids[cell]);
  }
  CentroidSet cs_;
  Archive a_;
};

TEST_F(ArchiveTest, EmptyArchiveNewCell) {
  EXPECT_EQ(a_.insert(at_cell("a", 0.5, 2)), InsertOutcome::kNewCell);
}

TEST_F(ArchiveTest, StrictImprovementReplaces) {
  a_.insert(at_cell("a", 0.5, 2));
  EXPECT_EQ(a_.insert(at_cell("b", 0.4, 2)), InsertOutcome::kReplaced);
  EXPECT_EQ(a_.cells().at(2).heuristic.id, "b");
}

TEST_F(ArchiveTest, TieKeepsIncumbent) {
  a_.insert(at_cell("a", 0.5, 2));
  EXPECT_EQ(a_.insert(at_cell("b", 0.5, 2)), InsertOutcome::kRejected);
  EXPECT_EQ(a_.cells().at(2).heuristic.id, "a");
}

TEST_F(ArchiveTest, UnevaluatedRejected) {
  auto c = at_cell("a", 0.5, 2);
  c.fitness.reset();
  EXPECT_THROW(a_.insert(c), ContractError);
}

TEST_F(ArchiveTest, Coverage) {
  EXPECT_EQ(coverage(a_), 0.0);
  for (int i = 0; i < 6; ++i) a_.insert(at_cell("c" + std::to_string(i), 0.1, i));
  EXPECT_EQ(coverage(a_), 1.0);
}

TEST(ArchiveCoverage, CountsDistinctCells) {
  Rng rng(2);
  const auto cs = build_centroids(11, 25, 1, {2000, 20});
  Archive a(cs, 25);
  std::set<int> cells;
  for (int i = 0; i < 40; ++i) {
    const auto v = random_point(rng, 11);
    cells.insert(assign_cell(v, cs));
    a.insert(candidate("x" + std::to_string(i), 0.5, v));
    EXPECT_DOUBLE_EQ(coverage(a), static_cast<double>(cells.size()) / 25.0);
  }
}

TEST(ArchiveCapacity, EvictsWorstWhenFull) {
  const auto cs = build_centroids(1, 4, 0, {500, 10});
  Archive a(cs, 2);
  a.insert(candidate("a", 0.5, cs.centroids[0]));
  a.insert(candidate("b", 0.3, cs.centroids[1]));
  EXPECT_EQ(a.insert(candidate("c", 0.6, cs.centroids[2])), InsertOutcome::kRejected);
  EXPECT_EQ(a.insert(candidate("d", 0.4, cs.centroids[2])), InsertOutcome::kNewCell);
  EXPECT_EQ(a.occupied(), 2);
  EXPECT_FALSE(a.cells().count(0));
}

// Property: random insert sequences preserve the archive invariants and
// each cell holds the best candidate that landed in it.
TEST(ArchiveProperties, RandomInsertSequences) {
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = static_cast<int>(rng.uniform_int(1, 4));
    const int count = static_cast<int>(rng.uniform_int(1, 12));
    const auto cs = build_centroids(dim, count, rng.next_u64(), {200, 5});
    Archive a(cs, 25);
    std::map<int, double> best;
    const int n = static_cast<int>(rng.uniform_int(1, 30));
    for (int i = 0; i < n; ++i) {
      const auto v = random_point(rng, dim);
      const double loss = static_cast<double>(rng.uniform_int(0, 5)) / 5.0;
      const int cell = brute_cell(v, cs);
      const auto before = a.cells();
      const auto out = a.insert(candidate("c" + std::to_string(i), loss, v));
      if (!best.count(cell)) {
        EXPECT_EQ(out, InsertOutcome::kNewCell);
        best[cell] = loss;
      } else if (loss < best[cell]) {
        EXPECT_EQ(out, InsertOutcome::kReplaced);
        best[cell] = loss;
      } else {
        EXPECT_EQ(out, InsertOutcome::kRejected);
        EXPECT_EQ(a.cells().at(cell).heuristic.id, before.at(cell).heuristic.id);
      }
      expect_invariants(a);
    }
  }
}

TEST(Retrieve, SingleOccupiedCell) {
  const auto cs = build_centroids(2, 5, 0, {500, 10});
  Archive a(cs, 25);
  a.insert(candidate("only", 0.2, cs.centroids[3]));
  const auto ex = retrieve_exemplars(a, Population{}, 2);
  ASSERT_EQ(ex.size(), 1u);
  EXPECT_EQ(ex[0].candidate.heuristic.id, "only");
  EXPECT_EQ(ex[0].cell_id, 3);
}

TEST(Retrieve, FallbackToElites) {
  Population p;
  p.members = {candidate("b", 0.2), candidate("a", 0.1), candidate("c", 0.3)};
  const auto ex = retrieve_exemplars(Archive(build_centroids(1, 2, 0), 25), p, 2);
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[0].candidate.heuristic.id, "a");
  EXPECT_EQ(ex[1].candidate.heuristic.id, "b");
  EXPECT_EQ(ex[0].cell_id, -1);
}

// Oracle: first is the fittest incumbent, second the occupied cell whose
// centroid is farthest from it (ties to the fitter incumbent).
TEST(Retrieve, MatchesBrutePairEnumeration) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cs = build_centroids(3, 12, rng.next_u64(), {300, 5});
    Archive a(cs, 25);
    const int k = static_cast<int>(rng.uniform_int(2, 6));
    std::set<int> cells;
    while (static_cast<int>(cells.size()) < k) cells.insert(static_cast<int>(rng.uniform_int(0, 11)));
    int i = 0;
    for (int cell : cells) {
      a.insert(candidate("c" + std::to_string(i++), rng.uniform01(), cs.centroids[cell]));
    }
    const auto ex = retrieve_exemplars(a, Population{}, 2);
    ASSERT_EQ(ex.size(), 2u);

    std::pair<int, int> best{-1, -1};
    double best_d = -1;
    int first = -1;
    for (int c : cells) {
      if (first < 0 || fitter(a.cells().at(c), a.cells().at(first))) first = c;
    }
    for (int c : cells) {
      if (c == first) continue;
      const double d = dist2(cs.centroids[first], cs.centroids[c]);
      if (d > best_d || (d == best_d && fitter(a.cells().at(c), a.cells().at(best.second)))) {
        best = {first, c};
        best_d = d;
      }
    }
    EXPECT_EQ(ex[0].cell_id, best.first);
    EXPECT_EQ(ex[1].cell_id, best.second);
    EXPECT_NE(ex[0].cell_id, ex[1].cell_id);
  }
}

TEST(Summarize, FirstLineCapped) {
  Heuristic h;
  h.strategy_text = std::string(300, 'x') + "\nsecond";
  EXPECT_EQ(summarize(h).size(), 200u);
  h.strategy_text = "one\ntwo";
  EXPECT_EQ(summarize(h), "one");
}

}  // namespace
}  // namespace evoheur::archive
