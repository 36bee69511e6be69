#pragma once

#include <stdexcept>
#include <string>

namespace hallhom {

/// Base of every error raised by the library. The CLI maps the subclasses to
/// exit codes, so new error kinds should derive from one of them.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed files, unknown config keys.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Singular small matrix or two phases that coincide where they must differ.
class DegenerateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Iterative solve or eigen-iteration failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

}  // namespace hallhom
