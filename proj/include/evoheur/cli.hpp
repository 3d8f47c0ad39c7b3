// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface. Exit codes: 0 success, 1 runtime failure,
// 2 usage or configuration error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evoheur::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int main(int argc, char** argv, std::ostream& out, std::ostream& err);

// Convenience for tests: argv[0] is supplied.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace evoheur::cli
