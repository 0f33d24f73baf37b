#pragma once

#include <stdexcept>
#include <string>

namespace gsisio {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite data, non-convergence, or an inverted interval.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the mathematical inputs is violated (asymmetric matrix,
/// rank-deficient [G; H], empty intersection, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The observer gains do not admit finite framers.
class ExistenceError : public Error {
 public:
  ExistenceError(const std::string& what, int rank_minus, int rank_plus)
      : Error(what), rank_minus_(rank_minus), rank_plus_(rank_plus) {}

  int rank_minus() const { return rank_minus_; }
  int rank_plus() const { return rank_plus_; }

 private:
  int rank_minus_;
  int rank_plus_;
};

/// Malformed configuration or expression source.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsisio
