#pragma once

#include <stdexcept>
#include <string>

namespace favard {

/// Argument outside the region where an operation is defined (off-grid time,
/// empty window, unevaluable signal, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Integration produced a non-finite value.
class OverflowError : public std::overflow_error {
 public:
  OverflowError(const std::string& what, double time)
      : std::overflow_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// The long-horizon transition matrix shows no usable singular-value gap.
class NoDichotomyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration document.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace favard
