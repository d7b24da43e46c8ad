#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mbthp {

// Caller broke a documented precondition (bad permutation, invalid order, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix that must be invertible / positive definite was not.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative kernel failed to converge.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::size_t rows, std::size_t cols)
      : std::runtime_error(what + " (" + std::to_string(rows) + "x" +
                           std::to_string(cols) + ")"),
        rows_(rows),
        cols_(cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
};

// Requested a covariance structure the transceiver design does not cover.
class UnsupportedConfiguration : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be read or written; message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mbthp
