// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Outer evolutionary loop: seeding, generation steps, early stopping,
// budgets, trace persistence and resume.
//
// Output directory layout:
//   config.json           effective configuration
//   trace.jsonl           one record per event (see docs/trace_schema.md)
//   timings.jsonl         wall-clock measurements, kept out of the trace
//   state/gen_NNNN.json   snapshot after generation NNNN
//   result.json           final summary
//   best_heuristic.py     source of the best heuristic

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "evoheur/agents.hpp"
#include "evoheur/archive.hpp"
#include "evoheur/behavior.hpp"
#include "evoheur/core.hpp"
#include "evoheur/evaluator.hpp"
#include "evoheur/rng.hpp"
#include "evoheur/tasks.hpp"

namespace evoheur::workflow {

struct BackendConfig {
  std::string kind = "replay";  // replay | http
  std::string fixtures;         // replay: JSONL path
  agents::HttpOptions http;
};

struct RunConfig {
  tasks::TaskKind task = tasks::TaskKind::kTsp;
  int generations = 30;            // G
  int population = 10;             // n
  int proposals = 4;               // k
  int retrieval = 2;               // r
  int centroids = 25;              // C
  int patience = 3;                // ρ
  double min_improvement = 1e-4;   // δ_min
  double keep_ratio = 0.5;
  int n_proc = 12;
  double time_budget_seconds = 3600;  // τ_lim; 0 disables
  long token_budget = 0;              // 0 disables
  double candidate_timeout_seconds = 60;
  long memory_cap_bytes = 0;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  BackendConfig backend;
  std::string manifest;
  std::string out = "runs";
  std::vector<std::string> runner;  // guest runner argv; empty = stub runner
  std::size_t prompt_char_budget = 24000;
  int cvt_samples = 10000;
  int cvt_iterations = 50;

  // Throws ConfigError naming the first invalid field.
  void validate() const;
};

// Unknown keys are rejected. Relative paths are resolved against `base`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path);

// Manifest: {"task": ..., "instances": [entry, ...]} where an entry is
//   {"generate": {"size", "capacity", "constraints", "machines", "seed"}}
//   {"path": file}            TSPLIB / Taillard text or instance JSON
//   {"instance": {...}}       inline instance JSON
// and may carry "reference": number | "exact" | "two_opt" | "neh".
std::vector<tasks::Instance> load_manifest(const std::filesystem::path& path,
                                           tasks::TaskKind expected);
std::vector<tasks::Instance> manifest_instances(const nlohmann::json& manifest,
                                                tasks::TaskKind expected,
                                                const std::filesystem::path& base);

// Classical seed heuristic in the guest language for each task.
Heuristic builtin_seed(tasks::TaskKind kind);

// True iff the last ρ entries each improved on the best value before them
// by less than δ_min. Needs at least ρ + 1 entries.
bool no_improvement(std::span<const double> history, int patience, double min_improvement);

nlohmann::json candidate_to_json(const EvaluatedCandidate& c);
EvaluatedCandidate candidate_from_json(const nlohmann::json& j);

struct RunState {
  int generation = 0;
  Population population;
  archive::Archive archive;
  behavior::NormalizationBounds bounds;
  std::vector<double> history;  // best-so-far loss per generation, index 0 = P_0
  agents::BudgetLedger ledger;
  Rng rng;
  std::set<std::string> known_fingerprints;
  nlohmann::json backend_state;
  long trace_records = 0;
  long timing_records = 0;
  std::string stop_reason;  // empty while running
};

nlohmann::json state_to_json(const RunState& s);
// Throws ResumeError on any malformed field.
RunState state_from_json(const nlohmann::json& j, const RunConfig& cfg);

// Appends versioned records; every record gets a sequence number.
class TraceWriter {
 public:
  TraceWriter(const std::filesystem::path& dir, long trace_records, long timing_records,
              bool truncate);
  void record(nlohmann::json rec);
  void timing(nlohmann::json rec);
  long trace_records() const { return trace_seq_; }
  long timing_records() const { return timing_seq_; }

 private:
  std::ofstream trace_;
  std::ofstream timings_;
  long trace_seq_;
  long timing_seq_;
};

inline constexpr int kTraceVersion = 1;

struct RunResult {
  EvaluatedCandidate best;
  RunState state;
  std::filesystem::path dir;
};

class Engine {
 public:
  // The backend must outlive the engine.
  Engine(RunConfig cfg, std::uint64_t seed, agents::LlmBackend& backend,
         std::filesystem::path dir);

  // Fresh run: seeds P_0, writes generation 0 snapshot. Throws InitError.
  void initialize();
  // Continues from a snapshot in dir/state (the latest when `snapshot` is
  // empty). Throws ResumeError.
  void resume(const std::filesystem::path& snapshot = {});
  // One generation. Returns false when the run must stop.
  bool gen_step();
  // Loops to completion and writes result.json and best_heuristic.py.
  RunResult run();

  const RunState& state() const { return state_; }
  const eval::TrainingSet& training() const { return train_; }

 private:
  // Backend call; budget, fixture or backend exhaustion sets stop_reason.
  std::optional<agents::Completion> try_complete(const agents::Prompt& p);
  void persist();
  void write_result(const EvaluatedCandidate& best);
  void renormalize_population();
  nlohmann::json llm_record(const agents::Prompt& p, const agents::Completion& c,
                            const std::string& for_id) const;
  void record_generation(int kept, int evaluated, int failed, const std::string& proposal_error);

  RunConfig cfg_;
  std::uint64_t seed_;
  agents::LlmBackend& backend_;
  std::filesystem::path dir_;
  eval::TrainingSet train_;
  eval::RunnerCommand runner_;
  RunState state_;
  std::unique_ptr<TraceWriter> trace_;
  std::map<std::string, double> eval_seconds_;
};

// Stub runner next to the running executable, else found on PATH.
std::vector<std::string> default_runner_argv();

// Best candidate over the union of population and archive incumbents.
EvaluatedCandidate best_of(const RunState& s);

std::filesystem::path latest_snapshot(const std::filesystem::path& dir);

}  // namespace evoheur::workflow
