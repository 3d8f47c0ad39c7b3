// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "evoheur/errors.hpp"
#include "evoheur/screen.hpp"
#include "evoheur/tasks/contract.hpp"
#include "evoheur/workflow.hpp"

namespace evoheur::workflow {

using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

std::string format_id(const char* fmt, int a, int b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

std::string snapshot_name(int generation) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gen_%04d.json", generation);
  return buf;
}

// First comment line of the code, else the fallback.
std::string comment_strategy(const std::string& source, const std::string& fallback) {
  std::size_t pos = 0;
  while (pos < source.size()) {
    const auto end = source.find('\n', pos);
    std::string line = source.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos = end == std::string::npos ? source.size() : end + 1;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] != '#') continue;
    if (line.find("stub-policy:") != std::string::npos) continue;
    auto text = line.substr(first + 1);
    const auto s = text.find_first_not_of(" \t");
    if (s == std::string::npos) continue;
    text = text.substr(s);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.pop_back();
    return text;
  }
  return fallback;
}

json failure_json(const eval::EvalFailure& f) {
  return {{"category", eval::to_string(f.category)},
          {"message", f.message},
          {"instance", f.instance_index},
          {"step", f.step}};
}

json novelty_json(const std::optional<double>& n) {
  if (!n) return nullptr;
  if (std::isinf(*n)) return "inf";
  return *n;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

}  // namespace

std::vector<std::string> default_runner_argv() {
  std::error_code ec;
  const auto self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    for (const auto& dir : {self.parent_path(), self.parent_path().parent_path()}) {
      const auto candidate = dir / "evoheur-stub-runner";
      if (fs::exists(candidate)) return {candidate.string()};
    }
  }
  return {"evoheur-stub-runner"};
}

Engine::Engine(RunConfig cfg, std::uint64_t seed, agents::LlmBackend& backend, fs::path dir)
    : cfg_(std::move(cfg)), seed_(seed), backend_(backend), dir_(std::move(dir)) {
  cfg_.validate();
  train_ = eval::make_training_set(cfg_.task, load_manifest(cfg_.manifest, cfg_.task));
  runner_.argv = cfg_.runner.empty() ? default_runner_argv() : cfg_.runner;
}

std::optional<agents::Completion> Engine::try_complete(const agents::Prompt& p) {
  try {
    return agents::complete(backend_, p, state_.ledger);
  } catch (const BudgetExhaustedError&) {
    state_.stop_reason = "budget";
  } catch (const FixtureExhaustedError&) {
    state_.stop_reason = "fixtures_exhausted";
  } catch (const BackendError&) {
    state_.stop_reason = "backend_error";
  }
  return std::nullopt;
}

json Engine::llm_record(const agents::Prompt& p, const agents::Completion& c,
                        const std::string& for_id) const {
  return {{"type", "llm_call"},
          {"generation", state_.generation},
          {"role", agents::to_string(p.role)},
          {"for", for_id},
          {"backend", c.backend_id},
          {"prompt_chars", p.system_text.size() + p.user_text.size()},
          {"dropped_blocks", p.dropped_blocks},
          {"tokens_in", c.tokens_in},
          {"tokens_out", c.tokens_out}};
}

void Engine::renormalize_population() {
  for (auto& m : state_.population.members) {
    m.behavior_norm = behavior::normalize(m.behavior_raw, state_.bounds);
  }
}

void Engine::persist() {
  state_.backend_state = backend_.snapshot();
  state_.trace_records = trace_->trace_records();
  state_.timing_records = trace_->timing_records();
  json j = state_to_json(state_);
  json evals = json::object();
  for (const auto& m : state_.population.members) {
    if (auto it = eval_seconds_.find(m.heuristic.id); it != eval_seconds_.end()) {
      evals[m.heuristic.id] = it->second;
    }
  }
  for (const auto& [_, c] : state_.archive.cells()) {
    if (auto it = eval_seconds_.find(c.heuristic.id); it != eval_seconds_.end()) {
      evals[c.heuristic.id] = it->second;
    }
  }
  j["timing"] = {{"llm_seconds", state_.ledger.llm_seconds()},
                 {"elapsed_seconds", state_.ledger.elapsed_seconds()},
                 {"eval_seconds", evals}};
  const auto path = dir_ / "state" / snapshot_name(state_.generation);
  const auto tmp = path.string() + ".tmp";
  write_text(tmp, j.dump(1) + "\n");
  fs::rename(tmp, path);
}

void Engine::record_generation(int kept, int evaluated, int failed,
                               const std::string& proposal_error) {
  const auto best = best_of(state_);
  json pop = json::array();
  for (const auto& m : state_.population.members) pop.push_back(m.heuristic.id);
  trace_->record({{"type", "generation_summary"},
                  {"generation", state_.generation},
                  {"best_id", best.heuristic.id},
                  {"best_loss", state_.history.back()},
                  {"population", pop},
                  {"kept", kept},
                  {"evaluated", evaluated},
                  {"failed", failed},
                  {"archive_occupied", state_.archive.occupied()},
                  {"coverage", archive::coverage(state_.archive)},
                  {"queries", state_.ledger.queries()},
                  {"tokens_in", state_.ledger.tokens_in()},
                  {"tokens_out", state_.ledger.tokens_out()},
                  {"proposal_error", proposal_error}});
}

void Engine::initialize() {
  fs::create_directories(dir_ / "state");
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir_ / "state", ec)) fs::remove(e.path());
  fs::remove(dir_ / "result.json", ec);
  fs::remove(dir_ / "best_heuristic.py", ec);
  json cfg = config_to_json(cfg_);
  cfg["seed"] = seed_;
  write_text(dir_ / "config.json", cfg.dump(1) + "\n");
  const auto t0 = Clock::now();

  state_ = RunState();
  state_.rng = Rng(seed_);
  const std::uint64_t cvt_seed = state_.rng.next_u64();
  state_.archive = archive::Archive(
      archive::build_centroids(behavior::kDims, cfg_.centroids, cvt_seed,
                               {cfg_.cvt_samples, cfg_.cvt_iterations}),
      cfg_.centroids);
  state_.population.capacity = cfg_.population;
  state_.ledger = agents::BudgetLedger(cfg_.token_budget, cfg_.time_budget_seconds);
  trace_ = std::make_unique<TraceWriter>(dir_, 0, 0, true);
  eval_seconds_.clear();

  const auto& contract = tasks::task_contract(cfg_.task);
  std::vector<Heuristic> seeds;
  std::map<std::string, std::pair<long, long>> tokens;
  for (int i = 0; i < cfg_.population; ++i) {
    const auto prompt = agents::build_seed_prompt(contract, i);
    const std::string id = format_id("g000-s%02d", i, 0);
    const auto called = try_complete(prompt);
    if (!called) {
      state_.stop_reason.clear();
      break;
    }
    const auto& c = *called;
    trace_->record(llm_record(prompt, c, id));
    trace_->timing({{"kind", "llm_call"}, {"for", id}, {"seconds", c.latency_seconds}});
    Heuristic h;
    h.id = id;
    h.generation = 0;
    try {
      h.source = agents::extract_code(c.text, contract);
    } catch (const GenerationContractError&) {
      h.source = c.text;
    }
    h.strategy_text = comment_strategy(h.source, "seed variant " + std::to_string(i));
    tokens[id] = {c.tokens_in, c.tokens_out};
    seeds.push_back(std::move(h));
  }

  screen::ScreenOptions keep_all;
  keep_all.keep_ratio = 1.0;
  auto screened = screen::screen_batch(seeds, state_.archive, state_.known_fingerprints,
                                       state_.bounds, contract, keep_all);
  auto batch = eval::evaluate_batch(
      screened.kept, train_,
      {cfg_.candidate_timeout_seconds, cfg_.memory_cap_bytes, cfg_.n_proc}, runner_,
      keep_all.bulk_ops);

  std::vector<Heuristic> all = seeds;
  std::vector<screen::ScreenDecision> decisions = screened.decisions;
  if (batch.evaluated.empty()) {
    const Heuristic fallback = builtin_seed(cfg_.task);
    auto fb_screen = screen::screen_batch(std::span<const Heuristic>(&fallback, 1),
                                          state_.archive, state_.known_fingerprints,
                                          state_.bounds, contract, keep_all);
    auto fb = eval::evaluate_batch(
        fb_screen.kept, train_,
        {cfg_.candidate_timeout_seconds, cfg_.memory_cap_bytes, cfg_.n_proc}, runner_,
        keep_all.bulk_ops);
    all.push_back(fallback);
    decisions.push_back(fb_screen.decisions.front());
    for (auto& f : fb.failures) batch.failures.push_back(std::move(f));
    for (auto& e : fb.evaluated) batch.evaluated.push_back(std::move(e));
    if (batch.evaluated.empty()) {
      throw InitError("no valid initial heuristic, including the built-in " +
                      std::string(tasks::to_string(cfg_.task)) + " seed");
    }
  }
  for (const auto& d : decisions) {
    if (!d.fingerprint.empty()) state_.known_fingerprints.insert(d.fingerprint);
  }

  std::vector<std::vector<double>> raws;
  for (const auto& e : batch.evaluated) raws.push_back(e.candidate.behavior_raw);
  state_.bounds = behavior::update_or_freeze_bounds(state_.bounds, raws, 0);
  std::vector<EvaluatedCandidate> q;
  for (auto& e : batch.evaluated) {
    auto c = e.candidate;
    c.behavior_norm = behavior::normalize(c.behavior_raw, state_.bounds);
    if (auto it = tokens.find(c.heuristic.id); it != tokens.end()) {
      c.tokens_in = it->second.first;
      c.tokens_out = it->second.second;
    }
    eval_seconds_[c.heuristic.id] = c.eval_seconds;
    q.push_back(std::move(c));
  }
  state_.population = top_n_select(state_.population, q);

  std::size_t qi = 0, fi = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& h = all[i];
    const auto& d = decisions[i];
    trace_->record({{"type", "screen_decision"},
                    {"generation", 0},
                    {"id", h.id},
                    {"verdict", screen::to_string(d.verdict)},
                    {"detail", d.detail},
                    {"novelty", novelty_json(d.novelty)},
                    {"fingerprint", d.fingerprint}});
    json rec{{"type", "candidate"},
             {"generation", 0},
             {"id", h.id},
             {"parents", h.parent_ids},
             {"strategy", h.strategy_text},
             {"source", h.source},
             {"fingerprint", d.fingerprint}};
    if (d.verdict != screen::Verdict::kKept) {
      rec["status"] = "rejected";
    } else if (qi < q.size() && q[qi].heuristic.id == h.id) {
      const auto& c = q[qi++];
      rec["status"] = "evaluated";
      rec["loss"] = c.loss();
      rec["behavior_raw"] = c.behavior_raw;
      rec["behavior_norm"] = c.behavior_norm;
      trace_->timing({{"kind", "eval"}, {"for", h.id}, {"seconds", c.eval_seconds}});
    } else {
      const auto& f = batch.failures.at(fi++);
      rec["status"] = "failed";
      rec["failure"] = failure_json(f);
      trace_->timing({{"kind", "eval"}, {"for", h.id}, {"seconds", f.eval_seconds}});
    }
    if (auto it = tokens.find(h.id); it != tokens.end()) {
      rec["tokens_in"] = it->second.first;
      rec["tokens_out"] = it->second.second;
    }
    trace_->record(rec);
  }

  state_.generation = 0;
  state_.history = {state_.population.members.front().loss()};
  record_generation(static_cast<int>(screened.kept.size()), static_cast<int>(q.size()),
                    static_cast<int>(batch.failures.size()), "");
  trace_->timing({{"kind", "generation"},
                  {"generation", 0},
                  {"seconds", std::chrono::duration<double>(Clock::now() - t0).count()}});
  persist();
}

void Engine::resume(const fs::path& snapshot) {
  const fs::path path = snapshot.empty() ? latest_snapshot(dir_) : snapshot;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResumeError("cannot read snapshot '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ResumeError("snapshot '" + path.string() + "' is not valid JSON");
  }
  state_ = state_from_json(j, cfg_);
  if (state_.population.capacity != cfg_.population) {
    throw ResumeError("snapshot population capacity does not match the configuration");
  }
  backend_.restore(state_.backend_state);
  eval_seconds_.clear();
  if (j.contains("timing") && j["timing"].contains("eval_seconds")) {
    for (const auto& [id, s] : j["timing"]["eval_seconds"].items()) {
      eval_seconds_[id] = s.get<double>();
    }
  }
  trace_ = std::make_unique<TraceWriter>(dir_, state_.trace_records, state_.timing_records,
                                         false);
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir_ / "state", ec)) {
    const auto name = e.path().filename().string();
    if (name.rfind("gen_", 0) == 0 && name > snapshot_name(state_.generation)) {
      fs::remove(e.path());
    }
  }
  fs::remove(dir_ / "result.json", ec);
  fs::remove(dir_ / "best_heuristic.py", ec);
}

bool Engine::gen_step() {
  if (!trace_) throw ContractError("engine is not initialized");
  const auto t0 = Clock::now();
  const int t = state_.generation + 1;
  const auto& contract = tasks::task_contract(cfg_.task);

  const auto exemplars = archive::retrieve_exemplars(state_.archive, state_.population,
                                                     cfg_.retrieval);
  const auto names = behavior::coordinate_names(cfg_.task);
  const auto proposer = agents::build_proposer_prompt(
      state_.population, exemplars, contract, names,
      {cfg_.prompt_char_budget, cfg_.proposals});
  const auto proposed = try_complete(proposer);
  if (!proposed) return false;
  const auto& pc = *proposed;
  state_.generation = t;
  const std::string proposal_id = format_id("g%03d-p%d", t, 0);
  trace_->record(llm_record(proposer, pc, proposal_id));
  trace_->timing({{"kind", "llm_call"}, {"for", proposal_id}, {"seconds", pc.latency_seconds}});

  // One resample on a parse failure; the resample uses one generator slot so
  // a generation never exceeds 1 + k backend calls.
  std::vector<agents::StrategyDraft> drafts;
  std::string proposal_error;
  try {
    drafts = agents::parse_strategies(pc.text, cfg_.proposals);
  } catch (const ProposalParseError& e) {
    proposal_error = e.what();
  }
  if (!proposal_error.empty() && cfg_.proposals > 1) {
    const auto again = try_complete(proposer);
    if (again) {
      const std::string retry_id = format_id("g%03d-p%d", t, 1);
      trace_->record(llm_record(proposer, *again, retry_id));
      trace_->timing({{"kind", "llm_call"}, {"for", retry_id}, {"seconds", again->latency_seconds}});
      try {
        drafts = agents::parse_strategies(again->text, cfg_.proposals - 1);
        proposal_error.clear();
      } catch (const ProposalParseError& e) {
        proposal_error = e.what();
      }
    }
  }

  std::vector<std::string> parents;
  for (const auto& m : state_.population.members) parents.push_back(m.heuristic.id);
  for (const auto& x : exemplars) {
    if (std::find(parents.begin(), parents.end(), x.candidate.heuristic.id) == parents.end()) {
      parents.push_back(x.candidate.heuristic.id);
    }
  }

  std::vector<Heuristic> batch;
  std::map<std::string, std::pair<long, long>> tokens;
  std::map<std::string, std::string> targets;
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const auto prompt = agents::build_generator_prompt(drafts[i], contract);
    const std::string id = format_id("g%03d-c%d", t, static_cast<int>(i));
    const auto called = try_complete(prompt);
    if (!called) break;
    const auto& c = *called;
    trace_->record(llm_record(prompt, c, id));
    trace_->timing({{"kind", "llm_call"}, {"for", id}, {"seconds", c.latency_seconds}});
    Heuristic h;
    h.id = id;
    h.generation = t;
    h.parent_ids = parents;
    h.strategy_text = drafts[i].idea;
    try {
      h.source = agents::extract_code(c.text, contract);
    } catch (const GenerationContractError&) {
      h.source = c.text;
    }
    tokens[id] = {c.tokens_in, c.tokens_out};
    targets[id] = drafts[i].target_behavior;
    batch.push_back(std::move(h));
  }

  screen::ScreenOptions opts;
  opts.keep_ratio = cfg_.keep_ratio;
  const auto screened = screen::screen_batch(batch, state_.archive, state_.known_fingerprints,
                                             state_.bounds, contract, opts);
  for (const auto& d : screened.decisions) {
    if (!d.fingerprint.empty()) state_.known_fingerprints.insert(d.fingerprint);
  }
  auto result = eval::evaluate_batch(
      screened.kept, train_,
      {cfg_.candidate_timeout_seconds, cfg_.memory_cap_bytes, cfg_.n_proc}, runner_,
      opts.bulk_ops);

  std::vector<std::vector<double>> raws;
  for (const auto& e : result.evaluated) raws.push_back(e.candidate.behavior_raw);
  const auto before = state_.bounds;
  state_.bounds = behavior::update_or_freeze_bounds(state_.bounds, raws, t);
  if (state_.bounds.min != before.min || state_.bounds.max != before.max) {
    renormalize_population();
  }

  std::vector<EvaluatedCandidate> q;
  std::map<std::string, std::pair<int, archive::InsertOutcome>> placed;
  for (auto& e : result.evaluated) {
    auto c = e.candidate;
    c.behavior_norm = behavior::normalize(c.behavior_raw, state_.bounds);
    const auto& tk = tokens.at(c.heuristic.id);
    c.tokens_in = tk.first;
    c.tokens_out = tk.second;
    eval_seconds_[c.heuristic.id] = c.eval_seconds;
    q.push_back(std::move(c));
  }
  state_.population = top_n_select(state_.population, q);
  for (const auto& c : q) {
    const int cell = archive::assign_cell(c.behavior_norm, state_.archive.centroids());
    placed[c.heuristic.id] = {cell, state_.archive.insert(c)};
  }

  std::size_t qi = 0, fi = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& h = batch[i];
    const auto& d = screened.decisions[i];
    trace_->record({{"type", "screen_decision"},
                    {"generation", t},
                    {"id", h.id},
                    {"verdict", screen::to_string(d.verdict)},
                    {"detail", d.detail},
                    {"novelty", novelty_json(d.novelty)},
                    {"fingerprint", d.fingerprint}});
    json rec{{"type", "candidate"},
             {"generation", t},
             {"id", h.id},
             {"parents", h.parent_ids},
             {"strategy", h.strategy_text},
             {"target_behavior", targets[h.id]},
             {"source", h.source},
             {"fingerprint", d.fingerprint},
             {"tokens_in", tokens[h.id].first},
             {"tokens_out", tokens[h.id].second}};
    if (d.verdict != screen::Verdict::kKept) {
      rec["status"] = "rejected";
    } else if (qi < q.size() && q[qi].heuristic.id == h.id) {
      const auto& c = q[qi++];
      rec["status"] = "evaluated";
      rec["loss"] = c.loss();
      rec["behavior_raw"] = c.behavior_raw;
      rec["behavior_norm"] = c.behavior_norm;
      rec["cell"] = placed[h.id].first;
      rec["archive"] = archive::to_string(placed[h.id].second);
      trace_->timing({{"kind", "eval"}, {"for", h.id}, {"seconds", c.eval_seconds}});
    } else {
      const auto& f = result.failures.at(fi++);
      rec["status"] = "failed";
      rec["failure"] = failure_json(f);
      trace_->timing({{"kind", "eval"}, {"for", h.id}, {"seconds", f.eval_seconds}});
    }
    trace_->record(rec);
  }

  const double prev = state_.history.back();
  state_.history.push_back(std::min(prev, best_of(state_).loss()));
  record_generation(static_cast<int>(screened.kept.size()), static_cast<int>(q.size()),
                    static_cast<int>(result.failures.size()), proposal_error);
  trace_->timing({{"kind", "generation"},
                  {"generation", t},
                  {"seconds", std::chrono::duration<double>(Clock::now() - t0).count()}});
  persist();
  return state_.stop_reason.empty();
}

void Engine::write_result(const EvaluatedCandidate& best) {
  json pop = json::array();
  for (const auto& m : state_.population.members) pop.push_back(m.heuristic.id);
  json j{{"task", std::string(tasks::to_string(cfg_.task))},
         {"seed", seed_},
         {"stop_reason", state_.stop_reason},
         {"generations_completed", state_.generation},
         {"best",
          {{"id", best.heuristic.id},
           {"generation", best.heuristic.generation},
           {"loss", best.loss()},
           {"gap_percent", best.loss() * 100.0},
           {"strategy", best.heuristic.strategy_text}}},
         {"history", state_.history},
         {"population", pop},
         {"archive_occupied", state_.archive.occupied()},
         {"coverage", archive::coverage(state_.archive)},
         {"api_queries", state_.ledger.queries()},
         {"tokens_in", state_.ledger.tokens_in()},
         {"tokens_out", state_.ledger.tokens_out()},
         {"timing",
          {{"wall_seconds", state_.ledger.elapsed_seconds()},
           {"llm_seconds", state_.ledger.llm_seconds()}}}};
  write_text(dir_ / "result.json", j.dump(1) + "\n");
  write_text(dir_ / "best_heuristic.py", best.heuristic.source);
}

RunResult Engine::run() {
  if (!trace_) initialize();
  for (;;) {
    if (state_.generation >= cfg_.generations) {
      state_.stop_reason = "generations";
      break;
    }
    if (state_.generation >= 1 &&
        no_improvement(state_.history, cfg_.patience, cfg_.min_improvement)) {
      state_.stop_reason = "plateau";
      break;
    }
    if (!gen_step()) break;
  }
  const auto best = best_of(state_);
  write_result(best);
  return {best, state_, dir_};
}

}  // namespace evoheur::workflow
