// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Host-native guest runner for fixture heuristics. It speaks the sandbox
// protocol but does not execute guest code: a fixture declares the policy it
// implements in a comment line
//
//   # stub-policy: <name> key=value ...
//
// and the stub runs the equivalent native policy. Policies:
//
//   tsp.weighted   near=1 dest=0 lookahead=0
//   bpp.weighted   fit=1 index=0 exact=0
//   pfsp.weighted  total=0 gupta=0 first=0 idle=0
//   pfsp.neh
//   mkp.weighted   density=1 value=0 weight=0
//   crash          raises on the first decision
//   hang           never returns
//   invalid        infeasible decision at step `at` (default 0)
//   abort          terminates the process at the first decision
//   garbage        answers run_instance with a non-JSON line

#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "evoheur/tasks/contract.hpp"

namespace evoheur::sandbox {

struct StubDirective {
  std::string policy;
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const;
};

// Throws ConfigError when the source has no directive or a malformed one.
StubDirective parse_stub_directive(std::string_view source);

// Throws ConfigError for an unknown policy or one that does not fit `kind`.
std::unique_ptr<tasks::DecisionPolicy> make_stub_policy(const StubDirective& d,
                                                        tasks::TaskKind kind);

// Serves requests until shutdown or end of input. Returns the exit code.
int run_stub_runner(std::istream& in, std::ostream& out);

}  // namespace evoheur::sandbox
