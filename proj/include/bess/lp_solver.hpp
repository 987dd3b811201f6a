#pragma once

// Dense two-phase primal simplex.
//
//   maximize    c.x
//   subject to  A x <= b,  lower <= x <= upper
//
// Bounds may be infinite. Rows and columns are equilibrated before solving
// and the returned point is re-checked against the unscaled problem.

#include <cstddef>
#include <limits>
#include <vector>

namespace bess::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct LinearProgram {
  std::vector<double> objective;
  DenseMatrix constraints;
  std::vector<double> rhs;
  std::vector<double> var_lower;
  std::vector<double> var_upper;

  /// n variables in [0, +inf), no rows, zero objective.
  static LinearProgram with_variables(std::size_t n);

  /// Appends `coeffs . x <= rhs`. Rebuilds the matrix; fine for setup-time use.
  void add_row(const std::vector<double>& coeffs, double bound);

  std::size_t num_vars() const noexcept { return objective.size(); }
  std::size_t num_rows() const noexcept { return rhs.size(); }

  /// Throws DimensionError / ValidationError.
  void validate() const;
};

enum class Status { optimal, infeasible, unbounded };

const char* to_string(Status s);

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

enum class PivotRule {
  /// Smallest-index entering and leaving variables throughout.
  bland,
  /// Most negative reduced cost; falls back to Bland's rule while a run of
  /// degenerate pivots is in progress.
  dantzig_bland_fallback,
};

struct SolverOptions {
  PivotRule rule = PivotRule::bland;
  std::size_t degenerate_streak_limit = 30;
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  bool equilibrate = true;
  std::size_t max_iterations = 200000;
};

Solution solve(const LinearProgram& lp, const SolverOptions& opts = {});

/// Largest violation of rows and bounds, each normalized by
/// 1 + |b_i| + sum_j |a_ij x_j|.
double max_relative_violation(const LinearProgram& lp, const std::vector<double>& x);

}  // namespace bess::lp
