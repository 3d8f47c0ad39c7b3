// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/screen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>

#include "evoheur/errors.hpp"
#include "evoheur/guest_source.hpp"

namespace evoheur::screen {
namespace {

using guest::Token;
using guest::TokenKind;

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

bool is_dunder(const std::string& s) {
  return s.size() > 4 && s.rfind("__", 0) == 0 && s.compare(s.size() - 2, 2, "__") == 0;
}

void check_imports(const std::vector<Token>& toks, std::vector<Violation>& out) {
  const auto& deny = deny_list();
  auto flag = [&](const Token& t) {
    if (contains(deny.modules, t.text)) {
      out.push_back({"deny_list", "import of '" + t.text + "' is not allowed", t.line});
    }
  };
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const Token& t = toks[k];
    if (t.kind != TokenKind::kName) continue;
    const bool line_start = k == 0 || toks[k - 1].kind == TokenKind::kNewline ||
                            toks[k - 1].kind == TokenKind::kIndent ||
                            toks[k - 1].kind == TokenKind::kDedent ||
                            (toks[k - 1].kind == TokenKind::kOp && toks[k - 1].text == ";");
    if (!line_start) continue;
    if (t.text == "from" && k + 1 < toks.size()) {
      flag(toks[k + 1]);
    } else if (t.text == "import") {
      // import a.b as c, d
      bool expect_module = true;
      for (std::size_t j = k + 1; j < toks.size(); ++j) {
        const Token& u = toks[j];
        if (u.kind == TokenKind::kNewline || (u.kind == TokenKind::kOp && u.text == ";")) break;
        if (u.kind == TokenKind::kOp && u.text == ",") {
          expect_module = true;
          continue;
        }
        if (expect_module && u.kind == TokenKind::kName) flag(u);
        expect_module = false;
      }
    }
  }
}

void check_names(const std::vector<Token>& toks, std::vector<Violation>& out) {
  const auto& deny = deny_list();
  for (std::size_t k = 0; k < toks.size(); ++k) {
    const Token& t = toks[k];
    if (t.kind != TokenKind::kName) continue;
    const bool attribute = k > 0 && toks[k - 1].kind == TokenKind::kOp && toks[k - 1].text == ".";
    if (attribute && contains(deny.attributes, t.text)) {
      out.push_back({"deny_list", "attribute '." + t.text + "' is not allowed", t.line});
    } else if (!attribute && contains(deny.names, t.text)) {
      out.push_back({"deny_list", "name '" + t.text + "' is not allowed", t.line});
    } else if (is_dunder(t.text) && t.text != "__init__") {
      out.push_back({"deny_list", "dunder name '" + t.text + "' is not allowed", t.line});
    }
  }
}

double static_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) acc += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(acc);
}

}  // namespace

const DenyList& deny_list() {
  static const DenyList kDeny{
      {"os",        "sys",       "subprocess", "socket",   "ssl",       "urllib",
       "http",      "requests",  "httpx",      "aiohttp",  "asyncio",   "shutil",
       "pathlib",   "glob",      "tempfile",   "io",       "threading", "multiprocessing",
       "concurrent", "signal",   "ctypes",     "cffi",     "pickle",    "marshal",
       "shelve",    "importlib", "builtins",   "random",   "secrets",   "time",
       "datetime",  "uuid",      "resource",   "pty",      "fcntl",     "select",
       "mmap",      "webbrowser", "code",      "gc",       "inspect"},
      {"open",   "exec",   "eval",    "compile", "__import__", "input", "breakpoint", "globals",
       "locals", "vars",   "getattr", "setattr", "delattr",    "exit",  "quit"},
      {"random", "system", "popen"},
  };
  return kDeny;
}

std::vector<Violation> validate_contract(std::string_view source,
                                         const tasks::TaskContract& contract) {
  std::vector<Violation> out;
  guest::Module mod;
  try {
    mod = guest::parse(source);
  } catch (const ParseError& e) {
    out.push_back({"parse", e.what(), e.line()});
    return out;
  } catch (const std::exception& e) {
    out.push_back({"parse", e.what(), 0});
    return out;
  }

  const auto fns = guest::top_level_functions(mod);
  auto it = std::find_if(fns.begin(), fns.end(),
                         [&](const auto& f) { return f.name == contract.entry_point; });
  if (it == fns.end()) {
    out.push_back({"signature", "missing entry point '" + contract.signature() + "'", 0});
  } else if (it->varargs || it->params.size() != contract.params.size()) {
    out.push_back({"signature",
                   "entry point '" + contract.entry_point + "' takes " +
                       std::to_string(it->params.size()) + (it->varargs ? "+" : "") +
                       " parameters, expected " + std::to_string(contract.params.size()),
                   it->line});
  }
  check_imports(mod.tokens, out);
  check_names(mod.tokens, out);
  return out;
}

std::string fingerprint(std::string_view source) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const Token& t : guest::tokenize(source)) {
    mix(static_cast<unsigned char>(t.kind));
    for (char c : t.text) mix(static_cast<unsigned char>(c));
    mix(0);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kKept: return "kept";
    case Verdict::kRejectedMalformed: return "rejected_malformed";
    case Verdict::kRejectedDuplicate: return "rejected_duplicate";
    case Verdict::kRejectedRank: return "rejected_rank";
  }
  return "unknown";
}

ScreenResult screen_batch(std::span<const Heuristic> batch, const archive::Archive& archive,
                          const std::set<std::string>& known,
                          const behavior::NormalizationBounds& bounds,
                          const tasks::TaskContract& contract, const ScreenOptions& options) {
  if (!(options.keep_ratio > 0.0 && options.keep_ratio <= 1.0)) {
    throw ContractError("keep_ratio must lie in (0, 1]");
  }
  ScreenResult result;
  result.decisions.resize(batch.size());
  std::set<std::string> seen;
  std::vector<std::size_t> survivors;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto& d = result.decisions[i];
    d.heuristic_id = batch[i].id;
    const auto violations = validate_contract(batch[i].source, contract);
    if (!violations.empty()) {
      d.verdict = Verdict::kRejectedMalformed;
      d.detail = violations.front().check + ": " + violations.front().message;
      continue;
    }
    d.fingerprint = fingerprint(batch[i].source);
    if (known.count(d.fingerprint) || seen.count(d.fingerprint)) {
      d.verdict = Verdict::kRejectedDuplicate;
      d.detail = "fingerprint " + d.fingerprint + " already seen";
      continue;
    }
    seen.insert(d.fingerprint);
    survivors.push_back(i);
  }

  // Static sub-vectors of the archive incumbents (already normalized).
  std::vector<std::vector<double>> incumbents;
  for (const auto& [cell, c] : archive.cells()) {
    if (c.behavior_norm.size() != static_cast<std::size_t>(behavior::kDims)) continue;
    incumbents.emplace_back(c.behavior_norm.begin() + behavior::kRuntimeDims,
                            c.behavior_norm.end());
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> novelty(batch.size(), inf);
  if (!incumbents.empty()) {
    behavior::NormalizationBounds static_bounds;
    if (bounds.initialized()) {
      static_bounds.min.assign(bounds.min.begin() + behavior::kRuntimeDims, bounds.min.end());
      static_bounds.max.assign(bounds.max.begin() + behavior::kRuntimeDims, bounds.max.end());
    }
    for (std::size_t i : survivors) {
      const auto raw = behavior::static_features(batch[i].source, contract.entry_point,
                                                 options.bulk_ops)
                           .as_vector();
      const auto norm = static_bounds.initialized() ? behavior::normalize(raw, static_bounds)
                                                    : raw;
      double best = inf;
      for (const auto& inc : incumbents) best = std::min(best, static_distance(norm, inc));
      novelty[i] = best;
    }
  }

  std::vector<std::size_t> order = survivors;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return novelty[a] > novelty[b]; });
  const auto keep = static_cast<std::size_t>(
      std::ceil(options.keep_ratio * static_cast<double>(survivors.size()) - 1e-12));
  std::vector<char> kept(batch.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto& d = result.decisions[order[r]];
    d.novelty = novelty[order[r]];
    if (r < keep) {
      kept[order[r]] = 1;
      d.verdict = Verdict::kKept;
      d.detail = "rank " + std::to_string(r + 1) + " of " + std::to_string(order.size());
    } else {
      d.verdict = Verdict::kRejectedRank;
      d.detail = "rank " + std::to_string(r + 1) + " of " + std::to_string(order.size());
    }
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (kept[i]) result.kept.push_back(batch[i]);
  }
  return result;
}

}  // namespace evoheur::screen
