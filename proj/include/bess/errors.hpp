#pragma once

#include <stdexcept>
#include <string>

namespace bess {

/// Input that violates a documented precondition or invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands defined on different time grids or with mismatched lengths.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed input file. `row()` is the 1-based data row, 0 when the
/// problem is not tied to a single row.
class DataError : public ValidationError {
 public:
  DataError(const std::string& source, std::size_t row, const std::string& what)
      : ValidationError(format(source, row, what)), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  static std::string format(const std::string& source, std::size_t row,
                            const std::string& what) {
    if (row == 0) return source + ": " + what;
    return source + ": row " + std::to_string(row) + ": " + what;
  }

  std::size_t row_;
};

/// Day-ahead problem has no executable plan even after every fallback.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal contract (e.g. solver certificate failed). Never
/// expected on valid input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bess
