// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0
//
// Lexer and statement-level parser for the guest language (Python) that
// candidate heuristics are written in. The host never executes guest code;
// it only needs the token stream (fingerprints, deny-list checks) and the
// block structure (static behavior features, entry-point signature).

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace evoheur::guest {

enum class TokenKind { kName, kNumber, kString, kOp, kNewline, kIndent, kDedent, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  int line = 0;
};

// Python tokenization: comments and blank lines are dropped, indentation is
// reported as INDENT/DEDENT, newlines inside brackets are joined.
// Throws ParseError with the offending line.
std::vector<Token> tokenize(std::string_view source);

struct Statement {
  int line = 0;
  std::string keyword;  // leading keyword ("if", "def", ...) or empty
  bool compound = false;
  std::vector<Token> tokens;  // header for compound statements
  std::vector<Statement> body;
};

struct Module {
  std::vector<Statement> statements;
  std::vector<Token> tokens;
};

// Checks block structure, clause ordering, header shapes and a few
// expression-level sanity rules. Throws ParseError.
Module parse(std::string_view source);

struct FunctionSignature {
  std::string name;
  std::vector<std::string> params;  // plain positional parameters
  bool varargs = false;
  int line = 0;
};

// Top-level function definitions in source order.
std::vector<FunctionSignature> top_level_functions(const Module& m);

bool is_keyword(std::string_view word);

}  // namespace evoheur::guest
