#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace glvortex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mesh specification, degree, constraint set or parameter is out of range.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message carries the line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// An iterative or direct linear solve failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (relative residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Right-hand side of a pure-Neumann problem has a constant component.
class CompatibilityError : public Error {
 public:
  CompatibilityError(const std::string& what, double residual)
      : Error(what + " (constant component " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Requested observable is not available for the current state.
class UnavailableField : public Error {
 public:
  using Error::Error;
};

/// Point evaluation outside the source mesh.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A time step failed; the message names the sub-equation (and the step
/// index once it reaches the run loop).
class StepError : public Error {
 public:
  StepError(const std::string& what, std::string equation) : Error(what), equation_(std::move(equation)) {}
  const std::string& equation() const { return equation_; }

 private:
  std::string equation_;
};

/// Configuration file or CLI error; message names the key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace glvortex
