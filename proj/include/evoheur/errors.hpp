// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace evoheur {

// Base of every error the engine raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class EvaluationFailedError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// A heuristic made a choice the task contract forbids at decision `step`.
class InfeasibleDecisionError : public Error {
 public:
  InfeasibleDecisionError(const std::string& what, int step)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class ReferenceUnavailableError : public Error {
 public:
  using Error::Error;
};

class BudgetExhaustedError : public Error {
 public:
  using Error::Error;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

class FixtureExhaustedError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ProposalParseError : public Error {
 public:
  using Error::Error;
};

class GenerationContractError : public Error {
 public:
  using Error::Error;
};

class FeatureExtractionError : public Error {
 public:
  using Error::Error;
};

class ResumeError : public Error {
 public:
  using Error::Error;
};

class InitError : public Error {
 public:
  using Error::Error;
};

}  // namespace evoheur
