// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <regex>
#include <set>

#include "evoheur/agents.hpp"
#include "evoheur/errors.hpp"

namespace evoheur::agents {
namespace {

std::string proposer_system(int k) {
  return "You are the PROPOSER.\n"
         "Given:\n"
         "(1) parent heuristics from the current population,\n"
         "(2) exemplars retrieved from behaviorally distinct archive cells,\n"
         "draft " + std::to_string(k) + " strategy candidates in natural language only.\n"
         "\n"
         "Requirements:\n"
         "- preserve the task IO contract;\n"
         "- change one concrete algorithmic idea at a time;\n"
         "- prefer diverse ideas over near-duplicates;\n"
         "- output structured JSON only.\n"
         "\n"
         "Return:\n"
         "{\"strategies\": [{\"idea\": \"...\", \"target_behavior\": \"...\"}]}\n";
}

const char* kGeneratorSystem =
    "You are the GENERATOR.\n"
    "Translate the given strategy into executable code\n"
    "that exactly matches the task contract.\n"
    "\n"
    "Constraints:\n"
    "- return code only;\n"
    "- do not change the required function signature;\n"
    "- do not inject new algorithmic content;\n"
    "- keep execution deterministic.\n";

const char* kSeedSystem =
    "You write initial heuristics for a constructive solver.\n"
    "\n"
    "Constraints:\n"
    "- return code only;\n"
    "- do not change the required function signature;\n"
    "- keep execution deterministic;\n"
    "- use only the standard math module and numpy.\n";

std::string fmt_double(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string contract_block(const tasks::TaskContract& c) {
  std::string s;
  s += "Task: " + std::string(tasks::to_string(c.kind)) + "\n";
  s += c.description + "\n";
  s += "Required signature: def " + c.signature() + ":\n";
  s += "Return value: " + c.returns + "\n";
  return s;
}

std::string behavior_line(const EvaluatedCandidate& c, std::span<const std::string> names) {
  if (c.behavior_norm.empty()) return "";
  std::string s = "behavior:";
  const std::size_t n = std::min(names.size(), c.behavior_norm.size());
  for (std::size_t d = 0; d < n && d < 5; ++d) {
    s += (d ? ", " : " ") + names[d] + "=" + fmt_double(c.behavior_norm[d], "%.2f");
  }
  return s + "\n";
}

struct Block {
  std::string text;
  int generation = 0;
  int position = 0;
  bool parent = true;
};

}  // namespace

const char* to_string(Role r) {
  switch (r) {
    case Role::kProposer: return "proposer";
    case Role::kGenerator: return "generator";
    case Role::kSeed: return "seed";
  }
  return "unknown";
}

Role parse_role(std::string_view s) {
  if (s == "proposer") return Role::kProposer;
  if (s == "generator") return Role::kGenerator;
  if (s == "seed") return Role::kSeed;
  throw ConfigError("unknown role tag '" + std::string(s) + "'");
}

Prompt build_proposer_prompt(const Population& parents, const archive::ExemplarSet& exemplars,
                             const tasks::TaskContract& contract,
                             std::span<const std::string> behavior_names,
                             const PromptOptions& options) {
  std::vector<Block> blocks;
  int pos = 0;
  for (std::size_t i = 0; i < parents.members.size(); ++i) {
    const auto& m = parents.members[i];
    Block b;
    b.parent = true;
    b.generation = m.heuristic.generation;
    b.position = pos++;
    b.text = "[P" + std::to_string(i + 1) + "] id=" + m.heuristic.id +
             " generation=" + std::to_string(m.heuristic.generation) +
             " loss=" + (m.fitness ? fmt_double(m.fitness->loss) : std::string("n/a")) + "\n" +
             "strategy: " + archive::summarize(m.heuristic) + "\n";
    blocks.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < exemplars.size(); ++i) {
    const auto& x = exemplars[i];
    Block b;
    b.parent = false;
    b.generation = x.candidate.heuristic.generation;
    b.position = pos++;
    b.text = "[X" + std::to_string(i + 1) + "] id=" + x.candidate.heuristic.id +
             " cell=" + (x.cell_id >= 0 ? std::to_string(x.cell_id) : std::string("none")) +
             " loss=" + (x.candidate.fitness ? fmt_double(x.candidate.fitness->loss)
                                             : std::string("n/a")) +
             "\n" + "summary: " + x.summary + "\n" + behavior_line(x.candidate, behavior_names);
    blocks.push_back(std::move(b));
  }

  std::string names_line;
  for (std::size_t d = 0; d < behavior_names.size(); ++d) {
    names_line += (d ? ", " : "") + behavior_names[d];
  }

  auto render = [&](const std::vector<char>& keep, int dropped) {
    std::string u = contract_block(contract);
    u += "Objective direction: " +
         std::string(tasks::direction(contract.kind) == Direction::kMinimize ? "minimize"
                                                                              : "maximize") +
         " (loss is the relative gap to the reference, lower is better)\n";
    if (!names_line.empty()) u += "Behavior descriptor: " + names_line + "\n";
    u += "\nParent heuristics:\n";
    bool any = false;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].parent && keep[i]) {
        u += blocks[i].text;
        any = true;
      }
    }
    if (!any) u += "(none)\n";
    u += "\nArchive exemplars:\n";
    if (exemplars.empty()) {
      u += "(no archive exemplars yet)\n";
    } else {
      any = false;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (!blocks[i].parent && keep[i]) {
          u += blocks[i].text;
          any = true;
        }
      }
      if (!any) u += "(none)\n";
    }
    if (dropped > 0) {
      u += "\n(" + std::to_string(dropped) + " candidate blocks omitted to fit the prompt budget)\n";
    }
    u += "\nDraft " + std::to_string(options.k) + " strategies.\n";
    return u;
  };

  std::vector<char> keep(blocks.size(), 1);
  std::vector<std::size_t> drop_order(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) drop_order[i] = i;
  std::stable_sort(drop_order.begin(), drop_order.end(), [&](std::size_t a, std::size_t b) {
    if (blocks[a].generation != blocks[b].generation) {
      return blocks[a].generation < blocks[b].generation;
    }
    return blocks[a].position > blocks[b].position;
  });
  int dropped = 0;
  std::string user = render(keep, 0);
  for (std::size_t i = 0; i < drop_order.size() && user.size() > options.char_budget; ++i) {
    keep[drop_order[i]] = 0;
    ++dropped;
    user = render(keep, dropped);
  }

  Prompt p;
  p.role = Role::kProposer;
  p.system_text = proposer_system(options.k);
  p.user_text = std::move(user);
  p.expected_format = ExpectedFormat::kJsonStrategies;
  p.dropped_blocks = dropped;
  return p;
}

Prompt build_generator_prompt(const StrategyDraft& s, const tasks::TaskContract& contract) {
  if (s.idea.empty()) throw ContractError("generator prompt needs a non-empty idea");
  Prompt p;
  p.role = Role::kGenerator;
  p.system_text = kGeneratorSystem;
  p.expected_format = ExpectedFormat::kCodeOnly;
  std::string u = contract_block(contract);
  u += "\nStrategy:\n" + s.idea + "\n";
  if (!s.target_behavior.empty()) u += "Target behavior: " + s.target_behavior + "\n";
  u += "\nWrite the function `def " + contract.signature() +
       ":` implementing exactly this strategy. Return code only.\n";
  p.user_text = std::move(u);
  return p;
}

Prompt build_seed_prompt(const tasks::TaskContract& contract, int variant) {
  Prompt p;
  p.role = Role::kSeed;
  p.system_text = kSeedSystem;
  p.expected_format = ExpectedFormat::kCodeOnly;
  std::string u = contract_block(contract);
  u += "\nSeed variant: " + std::to_string(variant) + "\n";
  u += "Write a complete, self-contained heuristic `def " + contract.signature() +
       ":`. Start the code with a one-line comment describing its strategy. Return code "
       "only.\n";
  p.user_text = std::move(u);
  return p;
}

std::vector<StrategyDraft> parse_strategies(std::string_view text, int k) {
  if (k < 1) throw ContractError("parse_strategies: k must be positive");
  for (std::size_t start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    // Balanced-brace scan that ignores braces inside JSON strings.
    int depth = 0;
    bool in_string = false, escaped = false;
    std::size_t end = std::string_view::npos;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') in_string = true;
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) {
        end = i;
        break;
      }
    }
    if (end == std::string_view::npos) continue;
    const auto j = nlohmann::json::parse(text.substr(start, end - start + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    const auto it = j.find("strategies");
    if (it == j.end() || !it->is_array()) continue;

    std::vector<StrategyDraft> out;
    std::set<std::string> ideas;
    for (const auto& e : *it) {
      if (!e.is_object()) continue;
      const auto idea = e.find("idea");
      if (idea == e.end() || !idea->is_string()) continue;
      StrategyDraft d;
      d.idea = idea->get<std::string>();
      const auto b = d.idea.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) continue;
      d.idea = d.idea.substr(b, d.idea.find_last_not_of(" \t\r\n") - b + 1);
      if (!ideas.insert(d.idea).second) continue;
      const auto tb = e.find("target_behavior");
      if (tb != e.end() && tb->is_string()) d.target_behavior = tb->get<std::string>();
      out.push_back(std::move(d));
      if (static_cast<int>(out.size()) == k) break;
    }
    if (out.empty()) throw ProposalParseError("strategies array holds no usable idea");
    return out;
  }
  throw ProposalParseError("no JSON object with a \"strategies\" array");
}

std::string extract_code(std::string_view text, const tasks::TaskContract& contract) {
  std::string code(text);
  const auto fence = text.find("```");
  if (fence != std::string_view::npos) {
    auto body = text.find('\n', fence);
    body = body == std::string_view::npos ? text.size() : body + 1;
    const auto close = text.find("```", body);
    code = std::string(text.substr(body, close == std::string_view::npos ? std::string_view::npos
                                                                          : close - body));
  }
  const std::regex def("(^|\\n)[ \\t]*def[ \\t]+" + contract.entry_point + "[ \\t]*\\(");
  if (!std::regex_search(code, def)) {
    throw GenerationContractError("completion does not define '" + contract.entry_point + "'");
  }
  return code;
}

long estimate_tokens(std::string_view text) {
  return static_cast<long>((text.size() + 3) / 4);
}

}  // namespace evoheur::agents
