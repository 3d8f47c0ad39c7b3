// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pre-evaluation filter: contract validation, duplicate rejection and
// novelty ranking on static program features.

#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoheur/archive.hpp"
#include "evoheur/behavior.hpp"
#include "evoheur/core.hpp"
#include "evoheur/tasks/contract.hpp"

namespace evoheur::screen {

struct DenyList {
  std::vector<std::string> modules;     // import targets (top-level package)
  std::vector<std::string> names;       // bare names
  std::vector<std::string> attributes;  // `.attr` accesses
};

// File, network, process, thread, introspection and nondeterminism
// facilities. Any dunder name other than __init__ is also refused.
const DenyList& deny_list();

struct Violation {
  std::string check;  // parse | signature | deny_list
  std::string message;
  int line = 0;
};

// Empty result means the source is acceptable. Never throws.
std::vector<Violation> validate_contract(std::string_view source,
                                         const tasks::TaskContract& contract);

// FNV-1a 64 of the token stream (kind and text of every token), as 16 hex
// digits. Formatting and comments do not matter; literals do. Throws
// ParseError when the source does not tokenize.
std::string fingerprint(std::string_view source);

enum class Verdict { kKept, kRejectedMalformed, kRejectedDuplicate, kRejectedRank };

const char* to_string(Verdict v);

struct ScreenDecision {
  std::string heuristic_id;
  Verdict verdict = Verdict::kKept;
  std::string detail;
  std::optional<double> novelty;  // set once ranked; +inf with an empty archive
  std::string fingerprint;        // empty for malformed sources
};

struct ScreenOptions {
  double keep_ratio = 0.5;
  std::vector<std::string> bulk_ops = behavior::default_bulk_ops();
};

struct ScreenResult {
  std::vector<Heuristic> kept;
  std::vector<ScreenDecision> decisions;  // one per input, in input order
};

// Validates, drops fingerprints already in `known` or earlier in the batch,
// then keeps ceil(keep_ratio * survivors) by descending novelty (distance of
// the normalized static features to the nearest archive incumbent's static
// sub-vector), ties by batch index. Throws ContractError when keep_ratio is
// outside (0, 1].
ScreenResult screen_batch(std::span<const Heuristic> batch, const archive::Archive& archive,
                          const std::set<std::string>& known,
                          const behavior::NormalizationBounds& bounds,
                          const tasks::TaskContract& contract, const ScreenOptions& options);

}  // namespace evoheur::screen
