// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// evoheur-stub-runner: native guest runner for fixture heuristics.

#include <iostream>

#include "evoheur/stub_runner.hpp"

int main() {
  std::ios::sync_with_stdio(false);
  return evoheur::sandbox::run_stub_runner(std::cin, std::cout);
}
