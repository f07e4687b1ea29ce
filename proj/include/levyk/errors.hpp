#pragma once

#include <stdexcept>
#include <string>

namespace levyk {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (x = 0 for a
/// singular density, negative times, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Exponential-rate machinery requested for a profile that has no
/// exponential rate (subexponential), or a profile rejected outright.
class UnsupportedProfile : public Error {
 public:
  using Error::Error;
};

/// A quadrature or iteration failed to reach its tolerance. Carries the best
/// value seen and its error estimate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double partial, double error)
      : Error(what), partial_(partial), error_(error) {}

  double partial_value() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

/// The symbol 1/(alpha + Psi) is not integrable in the requested dimension;
/// callers should fall back to the time-domain route.
class NonIntegrableSymbol : public Error {
 public:
  using Error::Error;
};

/// Malformed or schema-violating configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace levyk
