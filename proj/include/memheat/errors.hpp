#pragma once

#include <stdexcept>
#include <string>

namespace memheat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
  /// True for failures of a numerical procedure, false for bad input.
  virtual bool numerical() const noexcept { return false; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation"; }
};

/// Evaluation of a kernel that is unbounded at the requested point.
class SingularEvaluation : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "singular_evaluation"; }
};

class IndexError : public DomainError {
 public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "index"; }
};

class WrongKernelFamily : public ValidationError {
 public:
  using ValidationError::ValidationError;
  const char* kind() const noexcept override { return "wrong_kernel_family"; }
};

/// Base class of numerical failures; carries the best error estimate reached.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }
  bool numerical() const noexcept override { return true; }

 private:
  double estimate_;
};

class QuadratureFailure : public NumericalError {
 public:
  QuadratureFailure(const std::string& what, double best_value, double estimate)
      : NumericalError(what, estimate), best_value_(best_value) {}
  double best_value() const noexcept { return best_value_; }
  const char* kind() const noexcept override { return "quadrature_failure"; }

 private:
  double best_value_;
};

class InfiniteFlux : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "infinite_flux"; }
};

class NotAttained : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "not_attained"; }
};

class DivergentTransform : public NumericalError {
 public:
  using NumericalError::NumericalError;
  const char* kind() const noexcept override { return "divergent_transform"; }
};

class StabilityFailure : public NumericalError {
 public:
  StabilityFailure(const std::string& what, double amplification, double max_dt)
      : NumericalError(what, amplification), max_dt_(max_dt) {}
  /// Largest step found to pass the precheck, 0 if none was found.
  double max_admissible_dt() const noexcept { return max_dt_; }
  const char* kind() const noexcept override { return "stability_failure"; }

 private:
  double max_dt_;
};

}  // namespace memheat
