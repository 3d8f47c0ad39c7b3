// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Proposer and generator prompts, strict parsing of their outputs, and the
// chat backends (scripted replay and OpenAI-compatible HTTP).

#pragma once

#include <chrono>
#include <deque>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "evoheur/archive.hpp"
#include "evoheur/core.hpp"
#include "evoheur/tasks/contract.hpp"

namespace evoheur::agents {

enum class Role { kProposer, kGenerator, kSeed };
enum class ExpectedFormat { kJsonStrategies, kCodeOnly };

const char* to_string(Role r);
Role parse_role(std::string_view s);  // throws ConfigError

struct Prompt {
  Role role = Role::kProposer;
  std::string system_text;
  std::string user_text;
  ExpectedFormat expected_format = ExpectedFormat::kJsonStrategies;
  int dropped_blocks = 0;  // candidate blocks removed to fit the budget
};

struct StrategyDraft {
  std::string idea;
  std::string target_behavior;
};

struct Completion {
  std::string text;
  long tokens_in = 0;
  long tokens_out = 0;
  double latency_seconds = 0.0;
  std::string backend_id;
};

struct PromptOptions {
  std::size_t char_budget = 24000;  // user_text limit for the proposer
  int k = 4;                        // strategies requested
};

// Candidate blocks (parents, then exemplars) carry distinct ids. When the
// text would exceed the budget, blocks of the oldest generation go first.
Prompt build_proposer_prompt(const Population& parents, const archive::ExemplarSet& exemplars,
                             const tasks::TaskContract& contract,
                             std::span<const std::string> behavior_names,
                             const PromptOptions& options);

Prompt build_generator_prompt(const StrategyDraft& s, const tasks::TaskContract& contract);

// Asks for an initial heuristic; `variant` keeps the seed prompts distinct.
Prompt build_seed_prompt(const tasks::TaskContract& contract, int variant);

// First balanced JSON object with a "strategies" array, tolerating prose
// and fences. Entries with an empty idea or repeating an earlier idea are
// dropped, then the list is cut to k. Throws ProposalParseError when
// nothing usable remains.
std::vector<StrategyDraft> parse_strategies(std::string_view text, int k);

// First fenced block, else the whole text. Throws GenerationContractError
// when `def <entry_point>(` does not occur.
std::string extract_code(std::string_view text, const tasks::TaskContract& contract);

// ceil(chars / 4), used when a backend reports no usage.
long estimate_tokens(std::string_view text);

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string identity() const = 0;
  virtual std::string kind() const = 0;
  virtual Completion call(const Prompt& p) = 0;
  // Replay position, for resume. Stateless backends return null.
  virtual nlohmann::json snapshot() const { return nullptr; }
  virtual void restore(const nlohmann::json&) {}
};

// Pops fixture records per role tag in file order.
class ScriptedReplayBackend : public LlmBackend {
 public:
  struct Record {
    Role role;
    std::string text;
    long tokens_in = 0;
    long tokens_out = 0;
  };

  explicit ScriptedReplayBackend(std::vector<Record> records, std::string id = "scripted");
  // JSONL {role_tag, text, tokens_in, tokens_out}. Throws ParseError.
  static ScriptedReplayBackend from_jsonl(std::string_view text, std::string id = "scripted");
  static ScriptedReplayBackend from_file(const std::string& path);

  std::string identity() const override { return id_; }
  std::string kind() const override { return "scripted_replay"; }
  Completion call(const Prompt& p) override;  // throws FixtureExhaustedError
  nlohmann::json snapshot() const override;
  void restore(const nlohmann::json& state) override;  // throws ResumeError

  std::size_t remaining(Role r) const;

 private:
  std::string id_;
  std::map<Role, std::vector<Record>> queues_;
  std::map<Role, std::size_t> cursor_;
};

struct HttpOptions {
  std::string base_url = "https://api.openai.com/v1";
  std::string model;
  double temperature = 1.0;
  std::string api_key_env = "OPENAI_API_KEY";
  int max_attempts = 3;
  double backoff_seconds = 1.0;  // doubled after each failed attempt
  int timeout_seconds = 120;
};

// POST {base_url}/chat/completions. Retries transport failures and
// 429/5xx responses; throws BackendError when attempts run out.
class HttpChatBackend : public LlmBackend {
 public:
  explicit HttpChatBackend(HttpOptions options);

  std::string identity() const override { return options_.model + "@" + options_.base_url; }
  std::string kind() const override { return "http_chat"; }
  Completion call(const Prompt& p) override;

  static nlohmann::json request_body(const HttpOptions& options, const Prompt& p);
  // Parses a chat-completion response; falls back to estimated usage.
  static Completion parse_response(std::string_view body, const Prompt& p);

 private:
  HttpOptions options_;
};

// Token, query and time accounting with optional limits (0 = unlimited).
class BudgetLedger {
 public:
  BudgetLedger(long token_budget = 0, double time_budget_seconds = 0.0);

  // Throws BudgetExhaustedError when a limit has been reached.
  void check() const;
  void record(const Completion& c);

  long tokens_in() const { return tokens_in_; }
  long tokens_out() const { return tokens_out_; }
  long queries() const { return queries_; }
  double llm_seconds() const { return llm_seconds_; }
  double elapsed_seconds() const;

  long token_budget() const { return token_budget_; }
  double time_budget_seconds() const { return time_budget_; }

  nlohmann::json to_json() const;
  // Restores totals; elapsed time continues from the stored value.
  void restore(const nlohmann::json& j);

 private:
  long token_budget_;
  double time_budget_;
  long tokens_in_ = 0;
  long tokens_out_ = 0;
  long queries_ = 0;
  double llm_seconds_ = 0.0;
  double elapsed_before_ = 0.0;
  std::chrono::steady_clock::time_point start_;
};

// Budget check, backend call, ledger update.
Completion complete(LlmBackend& backend, const Prompt& p, BudgetLedger& ledger);

}  // namespace evoheur::agents
