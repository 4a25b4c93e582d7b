#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dcesim {

/// Invalid physical input (negative conductivity, non-positive length, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition of an operation does not hold; the message names
/// the failed condition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for numerical failures (exit code 3 at the CLI).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RootNotConverged : public NumericalError {
 public:
  RootNotConverged(double k_lo, double k_hi, double residual, int iterations);
  double k_lo, k_hi, residual;
  int iterations;
};

class QuadratureNotConverged : public NumericalError {
 public:
  QuadratureNotConverged(double estimate, double change, int panels);
  double estimate, change;
  int panels;
};

/// Fixed-step integration failed its step-size audit.
class RefinementRequired : public NumericalError {
 public:
  RefinementRequired(double dt, double relative_change);
  double dt, relative_change;
};

/// Drive table too coarse for the requested number of harmonics.
class ResolutionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Configuration error with the 1-based line of the offending entry (0 when
/// unknown). Exit code 2 at the CLI.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0);
  int line;
};

/// Collects non-fatal warnings emitted along a computation.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

}  // namespace dcesim
