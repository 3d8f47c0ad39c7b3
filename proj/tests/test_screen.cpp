// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "evoheur/errors.hpp"
#include "evoheur/guest_source.hpp"
#include "evoheur/rng.hpp"
#include "evoheur/screen.hpp"
#include "test_util.hpp"

namespace evoheur::screen {
namespace {

using tasks::TaskKind;

const tasks::TaskContract& tsp() { return tasks::task_contract(TaskKind::kTsp); }

const std::string kHeader =
    "def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):\n";

std::string with_body(const std::string& body) { return kHeader + body; }

bool has_check(const std::vector<Violation>& v, const std::string& check) {
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.check == check; });
}

TEST(ValidateContract, NearestNeighborFixtureIsClean) {
  const auto src = test::read_file(test::fixture("guest/tsp_nearest.py"));
  EXPECT_TRUE(validate_contract(src, tsp()).empty());
}

TEST(ValidateContract, OtherTaskFixtures) {
  EXPECT_TRUE(validate_contract(test::read_file(test::fixture("guest/bpp_best_fit.py")),
                                tasks::task_contract(TaskKind::kBpp))
                  .empty());
  EXPECT_TRUE(validate_contract(test::read_file(test::fixture("guest/pfsp_total.py")),
                                tasks::task_contract(TaskKind::kPfsp))
                  .empty());
  EXPECT_TRUE(validate_contract(test::read_file(test::fixture("guest/mkp_value.py")),
                                tasks::task_contract(TaskKind::kMkp))
                  .empty());
}

TEST(ValidateContract, WrongArity) {
  const auto v = validate_contract("def select_next_node(a, b, c):\n    return c[0]\n", tsp());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].check, "signature");
  EXPECT_EQ(v[0].line, 1);
}

TEST(ValidateContract, VarargsRefused) {
  EXPECT_TRUE(has_check(validate_contract("def select_next_node(*args):\n    return 0\n", tsp()),
                        "signature"));
}

TEST(ValidateContract, MissingEntryPoint) {
  EXPECT_TRUE(has_check(validate_contract("def other(a, b, c, d):\n    return 0\n", tsp()),
                        "signature"));
}

TEST(ValidateContract, SyntaxErrorFixture) {
  const auto v =
      validate_contract(test::read_file(test::fixture("guest/syntax_error.py")), tsp());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].check, "parse");
}

TEST(ValidateContract, EveryDeniedModule) {
  for (const auto& m : deny_list().modules) {
    SCOPED_TRACE(m);
    EXPECT_TRUE(has_check(validate_contract("import " + m + "\n" + with_body("    return 0\n"),
                                            tsp()),
                          "deny_list"));
    EXPECT_TRUE(has_check(
        validate_contract("from " + m + " import x\n" + with_body("    return 0\n"), tsp()),
        "deny_list"));
    EXPECT_TRUE(has_check(
        validate_contract("import math, " + m + ".sub as y\n" + with_body("    return 0\n"),
                          tsp()),
        "deny_list"));
    EXPECT_TRUE(has_check(validate_contract(with_body("    import " + m + "\n    return 0\n"),
                                            tsp()),
                          "deny_list"));
  }
}

TEST(ValidateContract, EveryDeniedName) {
  for (const auto& n : deny_list().names) {
    SCOPED_TRACE(n);
    const auto v = validate_contract(with_body("    f = " + n + "\n    return 0\n"), tsp());
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v[0].check, "deny_list");
    EXPECT_EQ(v[0].line, 2);
  }
}

TEST(ValidateContract, EveryDeniedAttribute) {
  for (const auto& a : deny_list().attributes) {
    SCOPED_TRACE(a);
    EXPECT_TRUE(has_check(
        validate_contract("import numpy as np\n" + with_body("    return np." + a + "()\n"),
                          tsp()),
        "deny_list"));
  }
}

TEST(ValidateContract, Dunders) {
  EXPECT_TRUE(has_check(
      validate_contract(with_body("    return current_node.__class__\n"), tsp()), "deny_list"));
  EXPECT_TRUE(validate_contract("class A:\n    def __init__(self):\n        self.x = 1\n" +
                                    with_body("    return unvisited_nodes[0]\n"),
                                tsp())
                  .empty());
}

TEST(ValidateContract, AllowedLookalikes) {
  EXPECT_TRUE(validate_contract("import math\nimport numpy as np\n" +
                                    with_body("    opened = 1\n    return unvisited_nodes[0]\n"),
                                tsp())
                  .empty());
  EXPECT_TRUE(
      validate_contract(with_body("    s = 'import os'\n    return unvisited_nodes[0]\n"), tsp())
          .empty());
}

TEST(Fingerprint, IgnoresFormattingAndComments) {
  const auto a = with_body("    return min(unvisited_nodes, key=lambda j: distance_matrix[current_node][j])\n");
  const auto b = "# a comment\n" + kHeader +
                 "    return min( unvisited_nodes ,key = lambda j:distance_matrix[current_node][j] )  # x\n";
  EXPECT_EQ(fingerprint(a), fingerprint(b));
  EXPECT_EQ(fingerprint(a).size(), 16u);
}

TEST(Fingerprint, LiteralChangesIt) {
  EXPECT_NE(fingerprint(with_body("    return unvisited_nodes[0]\n")),
            fingerprint(with_body("    return unvisited_nodes[1]\n")));
  EXPECT_NE(fingerprint(with_body("    s = 'a'\n    return 0\n")),
            fingerprint(with_body("    s = 'b'\n    return 0\n")));
}

TEST(Fingerprint, Untokenizable) {
  EXPECT_THROW(fingerprint("x = 'unterminated\n"), ParseError);
}

bool same_tokens(const std::string& a, const std::string& b) {
  const auto ta = guest::tokenize(a);
  const auto tb = guest::tokenize(b);
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].kind != tb[i].kind || ta[i].text != tb[i].text) return false;
  }
  return true;
}

// Oracle: fingerprints agree exactly when the token streams agree.
TEST(Fingerprint, MutationsMatchTokenStreamComparison) {
  const auto base = test::read_file(test::fixture("guest/loop_branch.py"));
  Rng rng(5);
  int equal = 0, differ = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::string m = base;
    switch (rng.uniform_int(0, 4)) {
      case 0: {
        const auto at = m.find(" < ");
        m.replace(at, 3, "  <   ");
        break;
      }
      case 1:
        m = "# note " + std::to_string(trial) + "\n" + m;
        break;
      case 2: {
        const auto at = m.find("[0]");
        m.replace(at, 3, "[" + std::to_string(rng.uniform_int(0, 2)) + "]");
        break;
      }
      case 3: {
        const auto at = m.find("best = node");
        m.replace(at, 4, rng.uniform_int(0, 1) ? "best" : "pick");
        break;
      }
      default: {
        const auto at = m.find("    return best");
        m.insert(at, "\n\n");
        break;
      }
    }
    const bool tokens = same_tokens(base, m);
    EXPECT_EQ(fingerprint(base) == fingerprint(m), tokens) << m;
    (tokens ? equal : differ)++;
  }
  EXPECT_GT(equal, 0);
  EXPECT_GT(differ, 0);
}

std::vector<Heuristic> four_valid() {
  return {
      test::heuristic("h0", with_body("    return unvisited_nodes[0]\n")),
      test::heuristic("h1", with_body("    return unvisited_nodes[-1]\n")),
      test::guest_fixture("tsp_nearest"),
      test::guest_fixture("loop_branch"),
  };
}

archive::Archive empty_archive() { return archive::Archive(archive::build_centroids(2, 2, 0), 25); }

TEST(ScreenBatch, EmptyArchiveKeepsFirstHalf) {
  const auto batch = four_valid();
  const auto r = screen_batch(batch, empty_archive(), {}, {}, tsp(), {.keep_ratio = 0.5});
  ASSERT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.kept[0].id, "h0");
  EXPECT_EQ(r.kept[1].id, "h1");
  ASSERT_EQ(r.decisions.size(), 4u);
  EXPECT_EQ(r.decisions[2].verdict, Verdict::kRejectedRank);
  EXPECT_EQ(r.decisions[3].verdict, Verdict::kRejectedRank);
  for (const auto& d : r.decisions) EXPECT_TRUE(std::isinf(*d.novelty));
}

TEST(ScreenBatch, KeepCountRoundsUp) {
  const auto batch = four_valid();
  const auto r = screen_batch(batch, empty_archive(), {}, {}, tsp(), {.keep_ratio = 0.6});
  EXPECT_EQ(r.kept.size(), 3u);
}

TEST(ScreenBatch, DuplicatePairAndKnownFingerprints) {
  auto batch = four_valid();
  batch.push_back(test::heuristic("dup", "# reformatted\n" + batch[0].source));
  batch.push_back(test::guest_fixture("syntax_error"));
  const std::set<std::string> known{fingerprint(batch[1].source)};
  const auto r = screen_batch(batch, empty_archive(), known, {}, tsp(), {.keep_ratio = 1.0});
  EXPECT_EQ(r.decisions[0].verdict, Verdict::kKept);
  EXPECT_EQ(r.decisions[1].verdict, Verdict::kRejectedDuplicate);
  EXPECT_EQ(r.decisions[4].verdict, Verdict::kRejectedDuplicate);
  EXPECT_EQ(r.decisions[5].verdict, Verdict::kRejectedMalformed);
  EXPECT_TRUE(r.decisions[5].fingerprint.empty());
  EXPECT_EQ(r.kept.size(), 3u);
}

TEST(ScreenBatch, KeepRatioValidated) {
  const auto batch = four_valid();
  EXPECT_THROW(screen_batch(batch, empty_archive(), {}, {}, tsp(), {.keep_ratio = 0.0}),
               ContractError);
  EXPECT_THROW(screen_batch(batch, empty_archive(), {}, {}, tsp(), {.keep_ratio = 1.5}),
               ContractError);
}

// Oracle: brute-force nearest-incumbent distance on raw static features,
// sorted descending with ties by batch index.
TEST(ScreenBatch, NoveltyRankingMatchesBruteForce) {
  const auto batch = four_valid();
  const auto cs = archive::build_centroids(behavior::kDims, 3, 1, {300, 5});
  archive::Archive a(cs, 25);
  Rng rng(3);
  std::vector<std::vector<double>> statics;
  for (int i = 0; i < 3; ++i) {
    auto c = test::candidate("inc" + std::to_string(i), 0.1, cs.centroids[i]);
    a.insert(c);
    statics.emplace_back(cs.centroids[i].begin() + behavior::kRuntimeDims, cs.centroids[i].end());
  }
  std::vector<std::pair<double, std::size_t>> expect;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto f = behavior::static_features(batch[i].source, "select_next_node").as_vector();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : statics) {
      double d = 0;
      for (std::size_t k = 0; k < s.size(); ++k) d += (f[k] - s[k]) * (f[k] - s[k]);
      best = std::min(best, std::sqrt(d));
    }
    expect.push_back({best, i});
  }
  std::stable_sort(expect.begin(), expect.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });

  const auto r = screen_batch(batch, a, {}, {}, tsp(), {.keep_ratio = 0.5});
  ASSERT_EQ(r.kept.size(), 2u);
  const auto lo = std::min(expect[0].second, expect[1].second);
  const auto hi = std::max(expect[0].second, expect[1].second);
  // Kept heuristics stay in batch order.
  EXPECT_EQ(r.kept[0].id, batch[lo].id);
  EXPECT_EQ(r.kept[1].id, batch[hi].id);
  EXPECT_EQ(r.decisions[expect[2].second].verdict, Verdict::kRejectedRank);
  EXPECT_EQ(r.decisions[expect[0].second].detail, "rank 1 of 4");
  for (const auto& [nov, i] : expect) EXPECT_NEAR(*r.decisions[i].novelty, nov, 1e-12);
}

TEST(ScreenVerdict, Names) {
  EXPECT_STREQ(to_string(Verdict::kRejectedDuplicate), "rejected_duplicate");
}

}  // namespace
}  // namespace evoheur::screen
