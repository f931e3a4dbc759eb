#pragma once

#include <stdexcept>
#include <string>

namespace frw {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside the domain of an operation (a <= 0, r = 0,
/// theta on the polar axis, 1 - kappa r^2 <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was not met by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DegenerateMetricError : public Error {
 public:
  using Error::Error;
};

/// Result would overflow the floating-point range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Physically inadmissible state (for example H^2 < 0 where H^2 >= 0 is required).
class InadmissibleStateError : public Error {
 public:
  using Error::Error;
};

/// Integration could not finish within its step budget.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Two routes that must agree do not; indicates a bug, never user error.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

/// Scenario configuration rejected. `field()` names the offending entry.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace frw
