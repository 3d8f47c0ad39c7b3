// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/stub_runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <regex>
#include <sstream>
#include <thread>

#include "evoheur/errors.hpp"
#include "evoheur/sandbox.hpp"
#include "evoheur/screen.hpp"

namespace evoheur::sandbox {
namespace {

using nlohmann::json;

class TspWeighted : public tasks::DecisionPolicy {
 public:
  explicit TspWeighted(const StubDirective& d)
      : near_(d.param("near", 1)), dest_(d.param("dest", 0)), look_(d.param("lookahead", 0)) {}

  int select_next_node(int current, int destination, std::span<const int> unvisited,
                       const tasks::TspInstance& inst) override {
    int best = unvisited.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (int j : unvisited) {
      double s = -near_ * inst.distance(current, j) - dest_ * inst.distance(j, destination);
      if (look_ != 0 && unvisited.size() > 1) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int k : unvisited) {
          if (k != j) nearest = std::min(nearest, inst.distance(j, k));
        }
        s -= look_ * nearest;
      }
      if (s > best_score) {
        best_score = s;
        best = j;
      }
    }
    return best;
  }

 private:
  double near_, dest_, look_;
};

class BppWeighted : public tasks::DecisionPolicy {
 public:
  explicit BppWeighted(const StubDirective& d)
      : fit_(d.param("fit", 1)), index_(d.param("index", 0)), exact_(d.param("exact", 0)) {}

  std::vector<double> bin_priority(int item, std::span<const int> residuals,
                                   const tasks::BppInstance&) override {
    std::vector<double> s;
    for (std::size_t b = 0; b < residuals.size(); ++b) {
      const int left = residuals[b] - item;
      s.push_back(-fit_ * left - index_ * static_cast<double>(b) + (left == 0 ? exact_ : 0.0));
    }
    return s;
  }

 private:
  double fit_, index_, exact_;
};

class PfspWeighted : public tasks::DecisionPolicy {
 public:
  explicit PfspWeighted(const StubDirective& d)
      : total_(d.param("total", 0)),
        gupta_(d.param("gupta", 0)),
        first_(d.param("first", 0)),
        idle_(d.param("idle", 0)) {}

  std::vector<double> job_priority(std::span<const int> completion,
                                   std::span<const int> unscheduled,
                                   const tasks::PfspInstance& inst) override {
    std::vector<double> s;
    for (int j : unscheduled) {
      double work = 0;
      for (int m = 0; m < inst.machines(); ++m) work += inst.ptimes[m][j];
      double idle = 0;
      long prev = completion[0] + inst.ptimes[0][j];
      for (int m = 1; m < inst.machines(); ++m) {
        idle += std::max(0L, prev - completion[m]);
        prev = std::max<long>(prev, completion[m]) + inst.ptimes[m][j];
      }
      double v = total_ * work - first_ * inst.ptimes[0][j] - idle_ * idle;
      if (gupta_ != 0) v += gupta_ * tasks::gupta_index(inst, j);
      s.push_back(v);
    }
    return s;
  }

 private:
  double total_, gupta_, first_, idle_;
};

class PfspNeh : public tasks::DecisionPolicy {
 public:
  std::vector<double> job_priority(std::span<const int>, std::span<const int> unscheduled,
                                   const tasks::PfspInstance& inst) override {
    if (position_.empty()) {
      const auto seq = tasks::neh(inst);
      position_.assign(seq.size(), 0);
      for (std::size_t i = 0; i < seq.size(); ++i) position_[seq[i]] = static_cast<int>(i);
    }
    std::vector<double> s;
    for (int j : unscheduled) s.push_back(-position_[j]);
    return s;
  }

 private:
  std::vector<int> position_;
};

class MkpWeighted : public tasks::DecisionPolicy {
 public:
  explicit MkpWeighted(const StubDirective& d)
      : density_(d.param("density", 1)), value_(d.param("value", 0)), weight_(d.param("weight", 0)) {}

  std::vector<double> item_priority(std::span<const long> remaining,
                                    std::span<const int> candidates,
                                    const tasks::MkpInstance& inst) override {
    std::vector<double> s;
    for (int j : candidates) {
      double load = 0;
      for (int c = 0; c < inst.constraints(); ++c) {
        load += static_cast<double>(inst.weights[c][j]) / std::max(1L, remaining[c]);
      }
      double v = value_ * inst.values[j] - weight_ * load;
      if (density_ != 0) v += density_ * tasks::mkp_item_density(inst, j);
      s.push_back(v);
    }
    return s;
  }

 private:
  double density_, value_, weight_;
};

// Misbehaves on the decision with index `at`; before that it acts like the
// simplest valid policy of each task.
class Faulty : public tasks::DecisionPolicy {
 public:
  Faulty(std::string mode, int at) : mode_(std::move(mode)), at_(at) {}

  int select_next_node(int, int, std::span<const int> unvisited,
                       const tasks::TspInstance&) override {
    if (trigger()) return 0;
    return unvisited.front();
  }
  std::vector<double> bin_priority(int, std::span<const int> residuals,
                                   const tasks::BppInstance&) override {
    return scores(residuals.size());
  }
  std::vector<double> job_priority(std::span<const int>, std::span<const int> unscheduled,
                                   const tasks::PfspInstance&) override {
    return scores(unscheduled.size());
  }
  std::vector<double> item_priority(std::span<const long>, std::span<const int> candidates,
                                    const tasks::MkpInstance&) override {
    return scores(candidates.size());
  }

 private:
  bool trigger() {
    if (calls_++ < at_) return false;
    if (mode_ == "crash") throw std::runtime_error("ZeroDivisionError: division by zero");
    if (mode_ == "abort") std::abort();
    if (mode_ == "hang") {
      for (;;) std::this_thread::sleep_for(std::chrono::seconds(1));
    }
    return true;
  }
  std::vector<double> scores(std::size_t n) {
    if (trigger()) return std::vector<double>(n, std::nan(""));
    std::vector<double> s(n, 0.0);
    return s;
  }

  std::string mode_;
  int at_;
  int calls_ = 0;
};

json error_payload(const std::string& category, const std::string& message, int step = -1) {
  json p{{"category", category}, {"message", message}};
  if (step >= 0) p["step"] = step;
  return p;
}

}  // namespace

double StubDirective::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

StubDirective parse_stub_directive(std::string_view source) {
  static const std::regex line_re(R"(^[ \t]*#[ \t]*stub-policy:[ \t]*([A-Za-z_.]+)(.*)$)");
  static const std::regex kv_re(R"(^([A-Za-z_]+)=([-+0-9.eE]+)$)");
  std::istringstream lines{std::string(source)};
  std::string line;
  while (std::getline(lines, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    StubDirective d;
    d.policy = m[1];
    std::istringstream rest(m[2].str());
    std::string tok;
    while (rest >> tok) {
      std::smatch kv;
      if (!std::regex_match(tok, kv, kv_re)) {
        throw ConfigError("malformed stub-policy parameter '" + tok + "'");
      }
      char* end = nullptr;
      const std::string num = kv[2];
      const double v = std::strtod(num.c_str(), &end);
      if (end != num.c_str() + num.size() || !std::isfinite(v)) {
        throw ConfigError("malformed stub-policy value '" + tok + "'");
      }
      d.params[kv[1]] = v;
    }
    return d;
  }
  throw ConfigError("no stub-policy directive");
}

std::unique_ptr<tasks::DecisionPolicy> make_stub_policy(const StubDirective& d,
                                                        tasks::TaskKind kind) {
  using tasks::TaskKind;
  if (d.policy == "crash" || d.policy == "hang" || d.policy == "invalid" ||
      d.policy == "abort" || d.policy == "garbage") {
    return std::make_unique<Faulty>(d.policy, static_cast<int>(d.param("at", 0)));
  }
  auto require = [&](TaskKind k) {
    if (kind != k) {
      throw ConfigError("stub policy '" + d.policy + "' does not fit task " +
                        std::string(tasks::to_string(kind)));
    }
  };
  if (d.policy == "tsp.weighted") {
    require(TaskKind::kTsp);
    return std::make_unique<TspWeighted>(d);
  }
  if (d.policy == "bpp.weighted") {
    require(TaskKind::kBpp);
    return std::make_unique<BppWeighted>(d);
  }
  if (d.policy == "pfsp.weighted") {
    require(TaskKind::kPfsp);
    return std::make_unique<PfspWeighted>(d);
  }
  if (d.policy == "pfsp.neh") {
    require(TaskKind::kPfsp);
    return std::make_unique<PfspNeh>();
  }
  if (d.policy == "mkp.weighted") {
    require(TaskKind::kMkp);
    return std::make_unique<MkpWeighted>(d);
  }
  throw ConfigError("unknown stub policy '" + d.policy + "'");
}

int run_stub_runner(std::istream& in, std::ostream& out) {
  bool shook = false;
  std::optional<StubDirective> loaded;
  tasks::TaskKind kind = tasks::TaskKind::kTsp;
  std::string line;
  auto reply = [&](long id, bool ok, json payload) {
    out << encode(Response{id, ok, std::move(payload)}) << '\n' << std::flush;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Request req;
    try {
      req = decode_request(line);
    } catch (const ParseError& e) {
      reply(0, false, error_payload("protocol", e.what()));
      continue;
    }
    if (req.msg == "handshake") {
      shook = true;
      reply(req.id, true, {{"protocol", kProtocolVersion}, {"runner", "evoheur-stub"}});
    } else if (req.msg == "shutdown") {
      reply(req.id, true, json::object());
      return 0;
    } else if (!shook) {
      reply(req.id, false, error_payload("protocol", "handshake required"));
    } else if (req.msg == "load") {
      loaded.reset();
      try {
        kind = tasks::parse_task_kind(req.payload.at("task_kind").get<std::string>());
        const auto source = req.payload.at("source").get<std::string>();
        const auto violations = screen::validate_contract(source, tasks::task_contract(kind));
        if (!violations.empty()) {
          const auto& v = violations.front();
          reply(req.id, false,
                error_payload("load", v.check + ": " + v.message + " (line " +
                                          std::to_string(v.line) + ")"));
          continue;
        }
        auto d = parse_stub_directive(source);
        make_stub_policy(d, kind);
        loaded = std::move(d);
        reply(req.id, true, json::object());
      } catch (const std::exception& e) {
        reply(req.id, false, error_payload("load", e.what()));
      }
    } else if (req.msg == "run_instance") {
      if (!loaded) {
        reply(req.id, false, error_payload("load", "no heuristic loaded"));
        continue;
      }
      if (loaded->policy == "garbage") {
        out << "Traceback (most recent call last): <garbage>\n" << std::flush;
        continue;
      }
      tasks::Instance inst;
      try {
        inst = instance_from_json(req.payload.at("instance"));
      } catch (const std::exception& e) {
        reply(req.id, false, error_payload("protocol", e.what()));
        continue;
      }
      const auto t0 = std::chrono::steady_clock::now();
      try {
        auto policy = make_stub_policy(*loaded, kind);
        const auto decisions = tasks::drive(inst, *policy);
        const auto replay = tasks::replay_decisions(inst, decisions);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        reply(req.id, true,
              {{"objective", replay.objective.value},
               {"decisions", decisions},
               {"steps", decisions.size()},
               {"wall_seconds", secs}});
      } catch (const InfeasibleDecisionError& e) {
        reply(req.id, false, error_payload("infeasible_decision", e.what(), e.step()));
      } catch (const std::exception& e) {
        reply(req.id, false, error_payload("crash", e.what()));
      }
    } else {
      reply(req.id, false, error_payload("protocol", "unknown message '" + req.msg + "'"));
    }
  }
  return 0;
}

}  // namespace evoheur::sandbox
