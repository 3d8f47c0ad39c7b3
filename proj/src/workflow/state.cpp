// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <regex>
#include <sstream>

#include "evoheur/errors.hpp"
#include "evoheur/workflow.hpp"

namespace evoheur::workflow {

using nlohmann::json;
namespace fs = std::filesystem;

bool no_improvement(std::span<const double> history, int patience, double min_improvement) {
  if (patience < 1) throw ConfigError("patience must be at least 1");
  const std::size_t p = static_cast<std::size_t>(patience);
  if (history.size() < p + 1) return false;
  for (std::size_t i = history.size() - p; i < history.size(); ++i) {
    const double before = *std::min_element(history.begin(), history.begin() + i);
    if (before - history[i] + 1e-12 >= min_improvement) return false;
  }
  return true;
}

json candidate_to_json(const EvaluatedCandidate& c) {
  json j{{"id", c.heuristic.id},
         {"generation", c.heuristic.generation},
         {"parents", c.heuristic.parent_ids},
         {"strategy", c.heuristic.strategy_text},
         {"source", c.heuristic.source},
         {"loss", nullptr},
         {"behavior_raw", c.behavior_raw},
         {"behavior_norm", c.behavior_norm},
         {"tokens_in", c.tokens_in},
         {"tokens_out", c.tokens_out}};
  if (c.fitness) j["loss"] = c.fitness->loss;
  return j;
}

EvaluatedCandidate candidate_from_json(const json& j) {
  try {
    EvaluatedCandidate c;
    c.heuristic.id = j.at("id").get<std::string>();
    c.heuristic.generation = j.at("generation").get<int>();
    c.heuristic.parent_ids = j.at("parents").get<std::vector<std::string>>();
    c.heuristic.strategy_text = j.at("strategy").get<std::string>();
    c.heuristic.source = j.at("source").get<std::string>();
    if (!j.at("loss").is_null()) c.fitness = FitnessScore{j.at("loss").get<double>()};
    c.behavior_raw = j.at("behavior_raw").get<std::vector<double>>();
    c.behavior_norm = j.at("behavior_norm").get<std::vector<double>>();
    c.tokens_in = j.at("tokens_in").get<long>();
    c.tokens_out = j.at("tokens_out").get<long>();
    return c;
  } catch (const json::exception& e) {
    throw ResumeError(std::string("malformed candidate: ") + e.what());
  }
}

json state_to_json(const RunState& s) {
  json pop = json::array();
  for (const auto& m : s.population.members) pop.push_back(candidate_to_json(m));
  json cells = json::array();
  for (const auto& [cell, c] : s.archive.cells()) {
    cells.push_back({{"cell", cell}, {"candidate", candidate_to_json(c)}});
  }
  return {{"version", kTraceVersion},
          {"generation", s.generation},
          {"population", {{"capacity", s.population.capacity}, {"members", pop}}},
          {"archive",
           {{"capacity", s.archive.capacity()},
            {"dim", s.archive.centroids().dim},
            {"centroids", s.archive.centroids().count()},
            {"cvt_seed", s.archive.centroids().seed},
            {"cells", cells}}},
          {"bounds",
           {{"min", s.bounds.min}, {"max", s.bounds.max}, {"frozen", s.bounds.frozen}}},
          {"history", s.history},
          {"ledger",
           {{"tokens_in", s.ledger.tokens_in()},
            {"tokens_out", s.ledger.tokens_out()},
            {"queries", s.ledger.queries()}}},
          {"rng", s.rng.state()},
          {"fingerprints", s.known_fingerprints},
          {"backend", s.backend_state},
          {"trace_records", s.trace_records},
          {"timing_records", s.timing_records}};
}

RunState state_from_json(const json& j, const RunConfig& cfg) {
  RunState s;
  try {
    if (j.at("version").get<int>() != kTraceVersion) throw ResumeError("unsupported snapshot version");
    s.generation = j.at("generation").get<int>();
    const auto& pop = j.at("population");
    s.population.capacity = pop.at("capacity").get<int>();
    for (const auto& m : pop.at("members")) s.population.members.push_back(candidate_from_json(m));

    const auto& a = j.at("archive");
    const int dim = a.at("dim").get<int>();
    const int count = a.at("centroids").get<int>();
    if (dim != behavior::kDims || count != cfg.centroids) {
      throw ResumeError("snapshot archive shape does not match the configuration");
    }
    auto cs = archive::build_centroids(dim, count, a.at("cvt_seed").get<std::uint64_t>(),
                                       {cfg.cvt_samples, cfg.cvt_iterations});
    s.archive = archive::Archive(std::move(cs), a.at("capacity").get<int>());
    for (const auto& c : a.at("cells")) {
      s.archive.restore_cell(c.at("cell").get<int>(), candidate_from_json(c.at("candidate")));
    }

    const auto& b = j.at("bounds");
    s.bounds.min = b.at("min").get<std::vector<double>>();
    s.bounds.max = b.at("max").get<std::vector<double>>();
    s.bounds.frozen = b.at("frozen").get<bool>();
    s.history = j.at("history").get<std::vector<double>>();

    s.ledger = agents::BudgetLedger(cfg.token_budget, cfg.time_budget_seconds);
    json ledger = j.at("ledger");
    if (j.contains("timing")) {
      const auto& t = j["timing"];
      ledger["llm_seconds"] = t.value("llm_seconds", 0.0);
      ledger["elapsed_seconds"] = t.value("elapsed_seconds", 0.0);
    }
    s.ledger.restore(ledger);

    if (!s.rng.set_state(j.at("rng").get<std::string>())) throw ResumeError("bad rng state");
    for (const auto& f : j.at("fingerprints")) s.known_fingerprints.insert(f.get<std::string>());
    s.backend_state = j.at("backend");
    s.trace_records = j.at("trace_records").get<long>();
    s.timing_records = j.at("timing_records").get<long>();
  } catch (const json::exception& e) {
    throw ResumeError(std::string("malformed snapshot: ") + e.what());
  } catch (const ContractError& e) {
    throw ResumeError(std::string("inconsistent snapshot: ") + e.what());
  }
  if (s.history.size() != static_cast<std::size_t>(s.generation) + 1) {
    throw ResumeError("snapshot history length does not match its generation");
  }
  if (s.population.empty()) throw ResumeError("snapshot population is empty");
  return s;
}

namespace {

// Keeps the first `n` lines of `path`; throws ResumeError when it has fewer.
void truncate_lines(const fs::path& path, long n) {
  std::vector<std::string> kept;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in && n > 0) throw ResumeError("missing '" + path.string() + "'");
    std::string line;
    while (static_cast<long>(kept.size()) < n && std::getline(in, line)) kept.push_back(line);
  }
  if (static_cast<long>(kept.size()) < n) {
    throw ResumeError("'" + path.string() + "' has fewer records than the snapshot expects");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& l : kept) out << l << '\n';
}

}  // namespace

TraceWriter::TraceWriter(const fs::path& dir, long trace_records, long timing_records,
                         bool truncate)
    : trace_seq_(trace_records), timing_seq_(timing_records) {
  const auto trace_path = dir / "trace.jsonl";
  const auto timing_path = dir / "timings.jsonl";
  if (truncate) {
    trace_.open(trace_path, std::ios::binary | std::ios::trunc);
    timings_.open(timing_path, std::ios::binary | std::ios::trunc);
  } else {
    truncate_lines(trace_path, trace_records);
    truncate_lines(timing_path, timing_records);
    trace_.open(trace_path, std::ios::binary | std::ios::app);
    timings_.open(timing_path, std::ios::binary | std::ios::app);
  }
  if (!trace_ || !timings_) throw Error("cannot open trace files in '" + dir.string() + "'");
}

void TraceWriter::record(json rec) {
  json out{{"v", kTraceVersion}, {"seq", trace_seq_++}};
  out.update(rec);
  trace_ << out.dump() << '\n';
  trace_.flush();
}

void TraceWriter::timing(json rec) {
  json out{{"seq", timing_seq_++}};
  out.update(rec);
  timings_ << out.dump() << '\n';
  timings_.flush();
}

fs::path latest_snapshot(const fs::path& dir) {
  static const std::regex name_re(R"(gen_(\d{4,})\.json)");
  fs::path best;
  long best_gen = -1;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir / "state", ec)) {
    std::smatch m;
    const auto name = e.path().filename().string();
    if (!std::regex_match(name, m, name_re)) continue;
    const long g = std::stol(m[1]);
    if (g > best_gen) {
      best_gen = g;
      best = e.path();
    }
  }
  if (best_gen < 0) throw ResumeError("no snapshot under '" + (dir / "state").string() + "'");
  return best;
}

EvaluatedCandidate best_of(const RunState& s) {
  const EvaluatedCandidate* best = nullptr;
  for (const auto& m : s.population.members) {
    if (!best || fitter(m, *best)) best = &m;
  }
  for (const auto& [_, c] : s.archive.cells()) {
    if (!best || fitter(c, *best)) best = &c;
  }
  if (!best) throw ContractError("run state holds no candidates");
  return *best;
}

}  // namespace evoheur::workflow
