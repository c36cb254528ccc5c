#pragma once

#include <stdexcept>
#include <string>

namespace csq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature could not reach its tolerance within the configured
/// refinement budget. Never carries a partial answer.
class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& what, double estimate_abs, double error)
      : Error(what), estimate_abs_(estimate_abs), error_(error) {}
  double estimate_abs() const noexcept { return estimate_abs_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_abs_;
  double error_;
};

/// A point or stencil fell outside the chart where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid model parameters, level mismatches, bad configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace csq
