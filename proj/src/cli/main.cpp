// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "evoheur/cli.hpp"

int main(int argc, char** argv) { return evoheur::cli::main(argc, argv, std::cout, std::cerr); }
