#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace sigmove {

/// Bad or inconsistent input data (malformed files, degenerate series).
/// Carries the 1-based data row when the problem is tied to one.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::optional<std::size_t> row = std::nullopt)
      : std::runtime_error(what), row_(row) {}

  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  std::optional<std::size_t> row_;
};

/// Caller passed arguments that violate an operation's contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure during computation (non-finite loss or gradient).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sigmove
