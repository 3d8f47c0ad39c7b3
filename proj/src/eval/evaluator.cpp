// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/evaluator.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

#include "evoheur/errors.hpp"
#include "evoheur/sandbox.hpp"
#include "evoheur/subprocess.hpp"
#include "evoheur/tasks/contract.hpp"

namespace evoheur::eval {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Session {
  Subprocess& proc;
  Clock::time_point deadline;
  long next_id = 1;
};

// Sends one request and waits for its response. Transport problems come
// back as a failure.
std::variant<sandbox::Response, EvalFailure> exchange(Session& s, const std::string& msg,
                                                      json payload) {
  sandbox::Request req;
  req.id = s.next_id++;
  req.msg = msg;
  req.payload = std::move(payload);
  EvalFailure f;
  auto io = s.proc.write_line(sandbox::encode(req), s.deadline);
  std::string line;
  if (io == Subprocess::Io::kOk) io = s.proc.read_line(line, s.deadline);
  switch (io) {
    case Subprocess::Io::kOk: break;
    case Subprocess::Io::kTimeout:
      s.proc.kill();
      f.category = FailureCategory::kTimeout;
      f.message = "no response to '" + msg + "' before the deadline; runner killed";
      return f;
    case Subprocess::Io::kEof:
      f.category = FailureCategory::kCrash;
      f.message = "runner terminated during '" + msg + "' (" + s.proc.finish() + ")";
      return f;
    case Subprocess::Io::kTooLong:
      s.proc.kill();
      f.category = FailureCategory::kProtocolError;
      f.message = "oversized response to '" + msg + "'";
      return f;
  }
  try {
    auto resp = sandbox::decode_response(line);
    if (resp.id != req.id) {
      f.category = FailureCategory::kProtocolError;
      f.message = "response id " + std::to_string(resp.id) + " does not match request " +
                  std::to_string(req.id);
      return f;
    }
    return resp;
  } catch (const ParseError& e) {
    f.category = FailureCategory::kProtocolError;
    f.message = std::string("unparsable response to '") + msg + "': " + e.what();
    return f;
  }
}

EvalFailure guest_error(const sandbox::Response& r, int instance_index) {
  EvalFailure f;
  f.instance_index = instance_index;
  const std::string category = r.payload.value("category", "");
  const std::string message = r.payload.value("message", "");
  f.step = r.payload.value("step", -1);
  if (category == "infeasible_decision") {
    f.category = FailureCategory::kInfeasibleDecision;
    f.message = message;
  } else if (category == "crash" || category == "load") {
    f.category = FailureCategory::kCrash;
    f.message = category == "load" ? "load: " + message : message;
  } else {
    f.category = FailureCategory::kProtocolError;
    f.message = "unknown error category '" + category + "': " + message;
  }
  return f;
}

bool same_objective(double a, double b) {
  return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b));
}

}  // namespace

const char* to_string(FailureCategory c) {
  switch (c) {
    case FailureCategory::kTimeout: return "timeout";
    case FailureCategory::kCrash: return "crash";
    case FailureCategory::kInfeasibleDecision: return "infeasible_decision";
    case FailureCategory::kProtocolError: return "protocol_error";
  }
  return "unknown";
}

TrainingSet make_training_set(tasks::TaskKind kind, std::vector<tasks::Instance> instances) {
  TrainingSet t;
  t.kind = kind;
  for (const auto& inst : instances) {
    if (tasks::kind_of(inst) != kind) {
      throw ConfigError("instance '" + tasks::name_of(inst) + "' is not a " +
                        std::string(tasks::to_string(kind)) + " instance");
    }
    const auto ref = tasks::reference_bound(inst);
    if (!(std::isfinite(ref.value) && ref.value != 0.0)) {
      throw ConfigError("instance '" + tasks::name_of(inst) + "' has an unusable reference");
    }
    t.references.push_back(ref);
  }
  t.instances = std::move(instances);
  return t;
}

EvalOutcome evaluate_candidate(const Heuristic& h, const TrainingSet& train,
                               const EvalLimits& limits, const RunnerCommand& runner,
                               std::span<const std::string> bulk_ops) {
  const auto t0 = Clock::now();
  auto elapsed = [&] {
    return std::max(1e-9, std::chrono::duration<double>(Clock::now() - t0).count());
  };
  auto fail = [&](EvalFailure f) -> EvalOutcome {
    f.heuristic_id = h.id;
    f.eval_seconds = elapsed();
    return f;
  };
  if (limits.timeout_seconds <= 0) throw ConfigError("timeout must be positive");
  if (train.instances.empty()) throw ConfigError("training set is empty");

  std::optional<Subprocess> proc;
  try {
    proc.emplace(runner.argv, limits.memory_cap_bytes);
  } catch (const Error& e) {
    return fail({h.id, FailureCategory::kCrash, std::string("cannot start runner: ") + e.what()});
  }
  Session s{*proc,
            t0 + std::chrono::duration_cast<Clock::duration>(
                     std::chrono::duration<double>(limits.timeout_seconds))};

  auto hs = exchange(s, "handshake", {{"protocol", sandbox::kProtocolVersion}});
  if (auto* f = std::get_if<EvalFailure>(&hs)) return fail(*f);
  {
    const auto& r = std::get<sandbox::Response>(hs);
    if (!r.ok || r.payload.value("protocol", -1) != sandbox::kProtocolVersion) {
      return fail({h.id, FailureCategory::kProtocolError, "handshake rejected"});
    }
  }

  const auto& contract = tasks::task_contract(train.kind);
  auto ld = exchange(s, "load",
                     {{"source", h.source},
                      {"entry_point", contract.entry_point},
                      {"task_kind", std::string(tasks::to_string(train.kind))}});
  if (auto* f = std::get_if<EvalFailure>(&ld)) return fail(*f);
  if (!std::get<sandbox::Response>(ld).ok) {
    return fail(guest_error(std::get<sandbox::Response>(ld), -1));
  }

  Evaluated out;
  std::vector<double> losses;
  std::vector<std::vector<int>> logs;
  const json driver = sandbox::driver_directive(train.kind);
  for (std::size_t i = 0; i < train.instances.size(); ++i) {
    const int idx = static_cast<int>(i);
    auto rr = exchange(s, "run_instance",
                       {{"instance", sandbox::instance_to_json(train.instances[i])},
                        {"driver", driver}});
    if (auto* f = std::get_if<EvalFailure>(&rr)) {
      f->instance_index = idx;
      return fail(*f);
    }
    const auto& r = std::get<sandbox::Response>(rr);
    if (!r.ok) return fail(guest_error(r, idx));

    InstanceRun run;
    double guest_objective = 0.0;
    long steps = 0;
    try {
      run.decisions = r.payload.at("decisions").get<std::vector<int>>();
      guest_objective = r.payload.at("objective").get<double>();
      steps = r.payload.at("steps").get<long>();
      run.guest_seconds = r.payload.value("wall_seconds", 0.0);
    } catch (const json::exception& e) {
      return fail({h.id, FailureCategory::kProtocolError,
                   std::string("malformed run_instance payload: ") + e.what(), idx});
    }
    if (steps != static_cast<long>(run.decisions.size())) {
      return fail({h.id, FailureCategory::kProtocolError,
                   "step count does not match the decision log", idx});
    }
    tasks::Replay replay;
    try {
      replay = tasks::replay_decisions(train.instances[i], run.decisions);
    } catch (const InfeasibleDecisionError& e) {
      return fail({h.id, FailureCategory::kInfeasibleDecision, e.what(), idx, e.step()});
    }
    if (!same_objective(guest_objective, replay.objective.value)) {
      return fail({h.id, FailureCategory::kProtocolError,
                   "guest objective " + std::to_string(guest_objective) +
                       " differs from replayed " + std::to_string(replay.objective.value),
                   idx});
    }
    run.objective = replay.objective.value;
    run.loss = tasks::instance_loss(replay.objective, train.references[i].value);
    losses.push_back(run.loss);
    logs.push_back(run.decisions);
    out.trace.runs.push_back(std::move(run));
  }
  exchange(s, "shutdown", json::object());
  proc->finish();

  out.candidate.heuristic = h;
  out.candidate.fitness = aggregate_fitness(losses);
  try {
    const auto runtime = behavior::runtime_features(train.kind, train.instances, logs);
    const auto st = behavior::static_features(h.source, contract.entry_point, bulk_ops);
    out.candidate.behavior_raw = behavior::assemble(runtime, st);
  } catch (const FeatureExtractionError& e) {
    return fail({h.id, FailureCategory::kProtocolError, e.what()});
  }
  out.candidate.eval_seconds = elapsed();
  out.trace.wall_seconds = out.candidate.eval_seconds;
  return out;
}

BatchResult evaluate_batch(std::span<const Heuristic> batch, const TrainingSet& train,
                           const EvalLimits& limits, const RunnerCommand& runner,
                           std::span<const std::string> bulk_ops) {
  if (limits.n_proc < 1) throw ConfigError("n_proc must be at least 1");
  std::vector<std::optional<EvalOutcome>> results(batch.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= batch.size()) return;
      try {
        results[i] = evaluate_candidate(batch[i], train, limits, runner, bulk_ops);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(limits.n_proc),
                                              batch.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  if (n > 0) worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  BatchResult out;
  for (auto& r : results) {
    if (auto* e = std::get_if<Evaluated>(&*r)) {
      out.evaluated.push_back(std::move(*e));
    } else {
      out.failures.push_back(std::get<EvalFailure>(*r));
    }
  }
  return out;
}

}  // namespace evoheur::eval
