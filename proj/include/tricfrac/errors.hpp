#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tricfrac {

// Base class for every failure reported by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: inconsistent array lengths, non-finite data, bad options.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Parameter outside the mathematical domain of an operation.
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Problem size exceeds the configured dense-work limit.
class SizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A continued-fraction denominator vanished: the shift sits numerically on
// an eigenvalue of a trailing submatrix.  index() is the 1-based position
// of the vanishing denominator.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Singular matrix or vanishing determinant outside the tail recurrences.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// An iterative routine exhausted its iteration budget.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Two redundant computations disagree (internal cross-checks).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace tricfrac
