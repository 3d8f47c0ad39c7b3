// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Runs screened candidates in guest runner processes over the training set
// and turns their decision logs into fitness and behavior vectors.

#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evoheur/behavior.hpp"
#include "evoheur/core.hpp"
#include "evoheur/tasks.hpp"

namespace evoheur::eval {

struct EvalLimits {
  double timeout_seconds = 60.0;  // whole candidate, all instances
  long memory_cap_bytes = 0;      // RLIMIT_AS of the runner; 0 = none
  int n_proc = 12;
};

// argv of the guest runner process, e.g. {"python3", "runner.py"}.
struct RunnerCommand {
  std::vector<std::string> argv;
};

struct TrainingSet {
  tasks::TaskKind kind = tasks::TaskKind::kTsp;
  std::vector<tasks::Instance> instances;
  std::vector<tasks::Reference> references;
};

// Computes reference_bound for every instance. Throws ConfigError when an
// instance does not belong to `kind` and ReferenceUnavailableError as
// reference_bound does.
TrainingSet make_training_set(tasks::TaskKind kind, std::vector<tasks::Instance> instances);

struct InstanceRun {
  std::vector<int> decisions;
  double objective = 0.0;
  double loss = 0.0;
  double guest_seconds = 0.0;
};

struct ExecutionTrace {
  std::vector<InstanceRun> runs;  // one per training instance
  double wall_seconds = 0.0;
};

enum class FailureCategory { kTimeout, kCrash, kInfeasibleDecision, kProtocolError };

const char* to_string(FailureCategory c);

struct EvalFailure {
  std::string heuristic_id;
  FailureCategory category = FailureCategory::kCrash;
  std::string message;
  int instance_index = -1;
  int step = -1;
  double eval_seconds = 0.0;
};

struct Evaluated {
  EvaluatedCandidate candidate;  // behavior_raw filled, behavior_norm empty
  ExecutionTrace trace;
};

using EvalOutcome = std::variant<Evaluated, EvalFailure>;

EvalOutcome evaluate_candidate(const Heuristic& h, const TrainingSet& train,
                               const EvalLimits& limits, const RunnerCommand& runner,
                               std::span<const std::string> bulk_ops);

struct BatchResult {
  std::vector<Evaluated> evaluated;  // Q, in batch order
  std::vector<EvalFailure> failures;  // in batch order
};

// Up to n_proc runner processes at once; results keep batch order.
BatchResult evaluate_batch(std::span<const Heuristic> batch, const TrainingSet& train,
                           const EvalLimits& limits, const RunnerCommand& runner,
                           std::span<const std::string> bulk_ops);

}  // namespace evoheur::eval
