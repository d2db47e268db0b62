#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wulff {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: non-finite components, inadmissible norms,
/// non-convex polygons, asymmetric matrices.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested at a point where it does not exist (xi = 0).
class DegeneratePoint : public Error {
 public:
  using Error::Error;
};

/// A point query fell outside the sampled grid.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation's documented precondition does not hold for its inputs.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Source and target masses differ by more than the admissible gap.
class CompatibilityError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// A run configuration could not be parsed; carries the offending field
/// (dot path) and its 1-based line, or 0 when the value came from an override.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, int line, const std::string& message)
      : Error(format(field, line, message)), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& message) {
    std::string where = line > 0 ? "line " + std::to_string(line) : std::string("override");
    return "config field '" + field + "' (" + where + "): " + message;
  }

  std::string field_;
  int line_;
};

/// An iterative solver stopped without meeting its tolerance.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace wulff
