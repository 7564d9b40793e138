#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpdrift {

/// Process exit codes used by the experiment harness.
enum class ExitCode : int {
  ok = 0,
  config = 2,
  solver = 3,
  statistical = 4,
};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept { return ExitCode::solver; }
};

/// A parameter lies outside its mathematical domain (Hurst index, exponent, grid).
class ParameterError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::config; }
};

/// The parameter is valid for the model but not supported by the requested operation.
class UnsupportedParameterError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// An operation's documented precondition does not hold.
class PreconditionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Kernel density evaluated on its diagonal singularity.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Two grids that must line up do not.
class AlignmentError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Covariance matrix failed Cholesky even after the jitter retry.
class DegeneracyError : public Error {
 public:
  DegeneracyError(const std::string& what, double smallest_pivot)
      : Error(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

/// A fractional derivative does not re-integrate to its argument, i.e. the
/// underlying Abel equation has no integrable solution at this resolution.
class NonSolvableError : public Error {
 public:
  NonSolvableError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// An iterative or direct solver did not meet its acceptance criterion.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::config; }
};

}  // namespace gpdrift
