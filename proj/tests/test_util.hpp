// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the test executables.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evoheur/core.hpp"
#include "evoheur/evaluator.hpp"

namespace evoheur::test {

inline std::filesystem::path source_dir() { return EVOHEUR_SOURCE_DIR; }
inline std::filesystem::path binary_dir() { return EVOHEUR_BINARY_DIR; }

inline std::filesystem::path fixture(const std::string& rel) {
  return source_dir() / "tests" / "fixtures" / rel;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline eval::RunnerCommand stub_runner() {
  return {{(binary_dir() / "evoheur-stub-runner").string()}};
}

inline Heuristic heuristic(const std::string& id, const std::string& source) {
  Heuristic h;
  h.id = id;
  h.source = source;
  return h;
}

inline Heuristic guest_fixture(const std::string& name) {
  return heuristic(name, read_file(fixture("guest/" + name + ".py")));
}

// Fresh directory under the build tree, removed first if present.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = binary_dir() / "test_scratch" / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline EvaluatedCandidate candidate(const std::string& id, double loss,
                                    std::vector<double> behavior = {}, int generation = 0) {
  EvaluatedCandidate c;
  c.heuristic = heuristic(id, "def f():\n    return 0\n");
  c.heuristic.generation = generation;
  c.fitness = FitnessScore{loss};
  c.behavior_norm = behavior.empty() ? std::vector<double>{0.5} : std::move(behavior);
  c.behavior_raw = c.behavior_norm;
  return c;
}

}  // namespace evoheur::test
