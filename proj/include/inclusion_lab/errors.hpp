// Copyright 2026 The inclusion-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef INCLUSION_LAB_ERRORS_HPP
#define INCLUSION_LAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace inclusion_lab {

/// Base class of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition was violated (dimension mismatch, bad range, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// An operator produced a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// The implicit time stepper failed; carries the offending step index.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// Run configuration could not be parsed; carries the JSON path of the field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace inclusion_lab

#endif  // INCLUSION_LAB_ERRORS_HPP
