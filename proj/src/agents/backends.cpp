// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "evoheur/agents.hpp"
#include "evoheur/errors.hpp"

namespace evoheur::agents {

using nlohmann::json;

ScriptedReplayBackend::ScriptedReplayBackend(std::vector<Record> records, std::string id)
    : id_(std::move(id)) {
  for (auto& r : records) queues_[r.role].push_back(std::move(r));
  for (auto role : {Role::kProposer, Role::kGenerator, Role::kSeed}) cursor_[role] = 0;
}

ScriptedReplayBackend ScriptedReplayBackend::from_jsonl(std::string_view text, std::string id) {
  std::vector<Record> records;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("invalid JSON record", lineno);
    try {
      Record r;
      r.role = parse_role(j.at("role_tag").get<std::string>());
      r.text = j.at("text").get<std::string>();
      r.tokens_in = j.value("tokens_in", 0L);
      r.tokens_out = j.value("tokens_out", 0L);
      if (r.tokens_in < 0 || r.tokens_out < 0) throw ParseError("negative token count", lineno);
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad fixture record: ") + e.what(), lineno);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return ScriptedReplayBackend(std::move(records), std::move(id));
}

ScriptedReplayBackend ScriptedReplayBackend::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read fixture file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str(), "scripted:" + path.substr(path.find_last_of('/') + 1));
}

Completion ScriptedReplayBackend::call(const Prompt& p) {
  auto& queue = queues_[p.role];
  auto& cur = cursor_[p.role];
  if (cur >= queue.size()) {
    throw FixtureExhaustedError(std::string("no ") + to_string(p.role) +
                                " fixture left after " + std::to_string(cur) + " calls");
  }
  const Record& r = queue[cur++];
  Completion c;
  c.text = r.text;
  c.tokens_in = r.tokens_in;
  c.tokens_out = r.tokens_out;
  c.latency_seconds = 0.0;
  c.backend_id = id_;
  return c;
}

json ScriptedReplayBackend::snapshot() const {
  json j = json::object();
  for (auto role : {Role::kProposer, Role::kGenerator, Role::kSeed}) {
    const auto it = cursor_.find(role);
    j[to_string(role)] = it == cursor_.end() ? std::size_t{0} : it->second;
  }
  return j;
}

void ScriptedReplayBackend::restore(const json& state) {
  if (!state.is_object()) throw ResumeError("scripted backend state must be an object");
  for (auto role : {Role::kProposer, Role::kGenerator, Role::kSeed}) {
    const std::size_t pos = state.value(to_string(role), std::size_t{0});
    if (pos > queues_[role].size()) {
      throw ResumeError(std::string("fixture cursor for ") + to_string(role) +
                        " is past the end of the fixture file");
    }
    cursor_[role] = pos;
  }
}

std::size_t ScriptedReplayBackend::remaining(Role r) const {
  const auto q = queues_.find(r);
  const std::size_t size = q == queues_.end() ? 0 : q->second.size();
  const auto c = cursor_.find(r);
  return size - (c == cursor_.end() ? 0 : c->second);
}

HttpChatBackend::HttpChatBackend(HttpOptions options) : options_(std::move(options)) {
  if (options_.model.empty()) throw ConfigError("http backend needs a model name");
  if (options_.max_attempts < 1) throw ConfigError("http backend needs max_attempts >= 1");
}

json HttpChatBackend::request_body(const HttpOptions& options, const Prompt& p) {
  return {
      {"model", options.model},
      {"messages",
       json::array({{{"role", "system"}, {"content", p.system_text}},
                    {{"role", "user"}, {"content", p.user_text}}})},
      {"temperature", options.temperature},
  };
}

Completion HttpChatBackend::parse_response(std::string_view body, const Prompt& p) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw BackendError("response is not a JSON object");
  Completion c;
  try {
    c.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    throw BackendError("response has no choices[0].message.content");
  }
  const auto usage = j.find("usage");
  const bool has_usage = usage != j.end() && usage->is_object() &&
                         usage->contains("prompt_tokens") && usage->contains("completion_tokens");
  if (has_usage) {
    c.tokens_in = (*usage)["prompt_tokens"].get<long>();
    c.tokens_out = (*usage)["completion_tokens"].get<long>();
  } else {
    c.tokens_in = estimate_tokens(p.system_text) + estimate_tokens(p.user_text);
    c.tokens_out = estimate_tokens(c.text);
  }
  return c;
}

Completion HttpChatBackend::call(const Prompt& p) {
  // Split "scheme://host[:port]/prefix".
  const std::string& url = options_.base_url;
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client cli(origin);
  cli.set_connection_timeout(options_.timeout_seconds);
  cli.set_read_timeout(options_.timeout_seconds);
  httplib::Headers headers;
  if (const char* key = std::getenv(options_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = request_body(options_, p).dump();

  double backoff = options_.backoff_seconds;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    const auto t0 = std::chrono::steady_clock::now();
    auto res = cli.Post(prefix + "/chat/completions", headers, body, "application/json");
    const double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (res && res->status == 200) {
      Completion c = parse_response(res->body, p);
      c.latency_seconds = latency;
      c.backend_id = identity();
      return c;
    }
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else {
      last_error = "HTTP " + std::to_string(res->status);
      const bool retryable = res->status == 429 || res->status >= 500;
      if (!retryable) throw BackendError(last_error + ": " + res->body.substr(0, 500));
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
  }
  throw BackendError("giving up after " + std::to_string(options_.max_attempts) +
                     " attempts: " + last_error);
}

BudgetLedger::BudgetLedger(long token_budget, double time_budget_seconds)
    : token_budget_(token_budget),
      time_budget_(time_budget_seconds),
      start_(std::chrono::steady_clock::now()) {}

double BudgetLedger::elapsed_seconds() const {
  return elapsed_before_ +
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

void BudgetLedger::check() const {
  if (token_budget_ > 0 && tokens_in_ + tokens_out_ >= token_budget_) {
    throw BudgetExhaustedError("token budget of " + std::to_string(token_budget_) +
                               " exhausted");
  }
  if (time_budget_ > 0 && elapsed_seconds() >= time_budget_) {
    throw BudgetExhaustedError("time budget exhausted");
  }
}

void BudgetLedger::record(const Completion& c) {
  tokens_in_ += c.tokens_in;
  tokens_out_ += c.tokens_out;
  llm_seconds_ += c.latency_seconds;
  ++queries_;
}

json BudgetLedger::to_json() const {
  return {{"tokens_in", tokens_in_},
          {"tokens_out", tokens_out_},
          {"queries", queries_},
          {"llm_seconds", llm_seconds_},
          {"elapsed_seconds", elapsed_seconds()}};
}

void BudgetLedger::restore(const json& j) {
  tokens_in_ = j.value("tokens_in", 0L);
  tokens_out_ = j.value("tokens_out", 0L);
  queries_ = j.value("queries", 0L);
  llm_seconds_ = j.value("llm_seconds", 0.0);
  elapsed_before_ = j.value("elapsed_seconds", 0.0);
  start_ = std::chrono::steady_clock::now();
}

Completion complete(LlmBackend& backend, const Prompt& p, BudgetLedger& ledger) {
  ledger.check();
  Completion c = backend.call(p);
  ledger.record(c);
  return c;
}

}  // namespace evoheur::agents
