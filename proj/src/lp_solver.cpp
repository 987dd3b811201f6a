#include "bess/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bess/errors.hpp"

namespace bess::lp {

LinearProgram LinearProgram::with_variables(std::size_t n) {
  LinearProgram lp;
  lp.objective.assign(n, 0.0);
  lp.constraints = DenseMatrix(0, n);
  lp.var_lower.assign(n, 0.0);
  lp.var_upper.assign(n, kInf);
  return lp;
}

void LinearProgram::add_row(const std::vector<double>& coeffs, double bound) {
  const std::size_t n = num_vars();
  if (coeffs.size() != n) {
    throw DimensionError("add_row: expected " + std::to_string(n) + " coefficients, got " +
                         std::to_string(coeffs.size()));
  }
  DenseMatrix grown(constraints.rows() + 1, n);
  for (std::size_t r = 0; r < constraints.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) grown(r, c) = constraints(r, c);
  }
  for (std::size_t c = 0; c < n; ++c) grown(constraints.rows(), c) = coeffs[c];
  constraints = std::move(grown);
  rhs.push_back(bound);
}

void LinearProgram::validate() const {
  const std::size_t n = objective.size();
  const std::size_t m = rhs.size();
  if (constraints.rows() != m || constraints.cols() != n) {
    throw DimensionError("LinearProgram: constraint matrix is " +
                         std::to_string(constraints.rows()) + "x" +
                         std::to_string(constraints.cols()) + ", expected " + std::to_string(m) +
                         "x" + std::to_string(n));
  }
  if (var_lower.size() != n || var_upper.size() != n) {
    throw DimensionError("LinearProgram: bound vectors must have one entry per variable");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(objective[j])) throw ValidationError("LinearProgram: non-finite objective");
    if (std::isnan(var_lower[j]) || std::isnan(var_upper[j]) || var_lower[j] == kInf ||
        var_upper[j] == -kInf || var_lower[j] > var_upper[j]) {
      throw ValidationError("LinearProgram: invalid bound on variable " + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(rhs[i])) throw ValidationError("LinearProgram: non-finite rhs");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(constraints(i, j))) {
        throw ValidationError("LinearProgram: non-finite matrix entry at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
    }
  }
}

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "?";
}

double max_relative_violation(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    double lhs = 0.0;
    double mag = 0.0;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) {
      lhs += lp.constraints(i, j) * x[j];
      mag += std::abs(lp.constraints(i, j) * x[j]);
    }
    const double v = (lhs - lp.rhs[i]) / (1.0 + std::abs(lp.rhs[i]) + mag);
    worst = std::max(worst, v);
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    worst = std::max(worst, (lp.var_lower[j] - x[j]) / (1.0 + std::abs(x[j])));
    worst = std::max(worst, (x[j] - lp.var_upper[j]) / (1.0 + std::abs(x[j])));
  }
  return worst;
}

namespace {

// Nearest power of two to 1/v, so scaling is exact in binary floating point.
double pow2_inverse(double v) {
  if (v <= 0.0 || !std::isfinite(v)) return 1.0;
  return std::ldexp(1.0, -std::ilogb(v));
}

// How a structural (nonnegative) column maps back onto an original variable:
// x_orig += sign * y + (shift applied once per variable).
struct ColumnMap {
  std::size_t var;
  double sign;
};

struct StandardForm {
  // rows x cols, A y <= b with y >= 0
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<ColumnMap> columns;
  std::vector<double> shift;  // per original variable
};

StandardForm to_standard_form(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  StandardForm sf;
  sf.shift.assign(n, 0.0);

  std::vector<std::size_t> upper_rows;  // variables needing an explicit y <= u - l row
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.var_lower[j];
    const double hi = lp.var_upper[j];
    if (std::isfinite(lo)) {
      sf.shift[j] = lo;
      sf.columns.push_back({j, 1.0});
      if (std::isfinite(hi)) upper_rows.push_back(j);
    } else if (std::isfinite(hi)) {
      sf.shift[j] = hi;
      sf.columns.push_back({j, -1.0});
    } else {
      sf.columns.push_back({j, 1.0});
      sf.columns.push_back({j, -1.0});
    }
  }

  const std::size_t ns = sf.columns.size();
  sf.c.assign(ns, 0.0);
  for (std::size_t k = 0; k < ns; ++k) sf.c[k] = lp.objective[sf.columns[k].var] * sf.columns[k].sign;

  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    std::vector<double> row(ns, 0.0);
    double b = lp.rhs[i];
    for (std::size_t j = 0; j < n; ++j) b -= lp.constraints(i, j) * sf.shift[j];
    for (std::size_t k = 0; k < ns; ++k) {
      row[k] = lp.constraints(i, sf.columns[k].var) * sf.columns[k].sign;
    }
    sf.a.push_back(std::move(row));
    sf.b.push_back(b);
  }
  for (std::size_t j : upper_rows) {
    std::vector<double> row(ns, 0.0);
    for (std::size_t k = 0; k < ns; ++k) {
      if (sf.columns[k].var == j) row[k] = 1.0;
    }
    sf.a.push_back(std::move(row));
    sf.b.push_back(lp.var_upper[j] - lp.var_lower[j]);
  }
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf, const std::vector<double>& col_scale, const SolverOptions& opts)
      : opts_(opts), m_(sf.b.size()), n_(sf.c.size()) {
    std::size_t artificials = 0;
    for (double b : sf.b) artificials += (b < 0.0) ? 1 : 0;
    art_begin_ = n_ + m_;
    width_ = n_ + m_ + artificials + 1;
    t_.assign(m_ * width_, 0.0);
    basis_.assign(m_, 0);
    phase1_.assign(width_, 0.0);
    phase2_.assign(width_, 0.0);

    std::size_t next_art = art_begin_;
    for (std::size_t i = 0; i < m_; ++i) {
      double* row = &t_[i * width_];
      const double sign = sf.b[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t k = 0; k < n_; ++k) row[k] = sign * sf.a[i][k] * col_scale[k];
      row[n_ + i] = sign;
      row[rhs_col()] = sign * sf.b[i];
      if (sign < 0.0) {
        row[next_art] = 1.0;
        basis_[i] = next_art++;
        // phase 1 maximizes -sum(artificials): reduced costs start at -sum of those rows
        for (std::size_t k = 0; k < width_; ++k) {
          if (k < art_begin_ || k == rhs_col()) phase1_[k] -= row[k];
        }
      } else {
        basis_[i] = n_ + i;
      }
    }
    for (std::size_t k = 0; k < n_; ++k) phase2_[k] = -sf.c[k] * col_scale[k];
    has_artificials_ = artificials > 0;
  }

  bool has_artificials() const { return has_artificials_; }

  // Returns the final status of the simplex run on the chosen objective row.
  Status run(bool phase_one) {
    std::vector<double>& obj = phase_one ? phase1_ : phase2_;
    const std::size_t col_limit = phase_one ? width_ - 1 : art_begin_;
    std::size_t degenerate_streak = 0;
    while (true) {
      if (iterations_ >= opts_.max_iterations) {
        throw InternalError("simplex: iteration limit reached");
      }
      const bool bland = opts_.rule == PivotRule::bland ||
                         degenerate_streak >= opts_.degenerate_streak_limit;
      std::size_t enter = width_;
      double best = -opts_.optimality_tol;
      for (std::size_t k = 0; k < col_limit; ++k) {
        if (obj[k] < best) {
          enter = k;
          if (bland) break;
          best = obj[k];
        }
      }
      if (enter == width_) return Status::optimal;

      std::size_t leave = m_;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = t_[i * width_ + enter];
        if (a <= opts_.pivot_tol) continue;
        const double ratio = t_[i * width_ + rhs_col()] / a;
        if (leave == m_ || ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return Status::unbounded;

      degenerate_streak = best_ratio <= 1e-12 ? degenerate_streak + 1 : 0;
      pivot(leave, enter);
    }
  }

  double phase1_value() const { return -phase1_[rhs_col()]; }

  double rhs_scale() const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) s = std::max(s, std::abs(t_[i * width_ + rhs_col()]));
    return s;
  }

  // Pivots remaining zero-level artificials out of the basis where possible.
  void expel_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      const double* row = &t_[i * width_];
      std::size_t best = width_;
      double mag = opts_.pivot_tol;
      for (std::size_t k = 0; k < art_begin_; ++k) {
        if (std::abs(row[k]) > mag) {
          mag = std::abs(row[k]);
          best = k;
        }
      }
      if (best != width_) pivot(i, best);
    }
  }

  std::vector<double> structural_values() const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) y[basis_[i]] = std::max(0.0, t_[i * width_ + rhs_col()]);
    }
    return y;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t rhs_col() const { return width_ - 1; }

  void pivot(std::size_t r, std::size_t e) {
    ++iterations_;
    double* prow = &t_[r * width_];
    const double inv = 1.0 / prow[e];
    nz_.clear();
    for (std::size_t k = 0; k < width_; ++k) {
      if (prow[k] != 0.0) {
        prow[k] *= inv;
        nz_.push_back(k);
      }
    }
    prow[e] = 1.0;
    auto eliminate = [&](double* row) {
      const double f = row[e];
      if (f == 0.0) return;
      for (std::size_t k : nz_) row[k] -= f * prow[k];
      row[e] = 0.0;
    };
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r) eliminate(&t_[i * width_]);
    }
    eliminate(phase1_.data());
    eliminate(phase2_.data());
    basis_[r] = e;
  }

  SolverOptions opts_;
  std::size_t m_;
  std::size_t n_;
  std::size_t art_begin_ = 0;
  std::size_t width_ = 0;
  bool has_artificials_ = false;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<double> phase1_;
  std::vector<double> phase2_;
  std::vector<std::size_t> nz_;
  std::size_t iterations_ = 0;
};

}  // namespace

Solution solve(const LinearProgram& lp, const SolverOptions& opts) {
  lp.validate();
  StandardForm sf = to_standard_form(lp);
  const std::size_t m = sf.b.size();
  const std::size_t ns = sf.c.size();

  std::vector<double> col_scale(ns, 1.0);
  if (opts.equilibrate) {
    for (std::size_t i = 0; i < m; ++i) {
      double mx = 0.0;
      for (double v : sf.a[i]) mx = std::max(mx, std::abs(v));
      const double s = pow2_inverse(mx);
      for (double& v : sf.a[i]) v *= s;
      sf.b[i] *= s;
    }
    for (std::size_t k = 0; k < ns; ++k) {
      double mx = 0.0;
      for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, std::abs(sf.a[i][k]));
      col_scale[k] = pow2_inverse(mx);
    }
  }

  Tableau tab(sf, col_scale, opts);
  Solution sol;
  if (tab.has_artificials()) {
    tab.run(/*phase_one=*/true);
    if (tab.phase1_value() > opts.feasibility_tol * (1.0 + tab.rhs_scale())) {
      sol.status = Status::infeasible;
      sol.iterations = tab.iterations();
      return sol;
    }
    tab.expel_artificials();
  }
  sol.status = tab.run(/*phase_one=*/false);
  sol.iterations = tab.iterations();
  if (sol.status == Status::unbounded) return sol;

  const std::vector<double> y = tab.structural_values();
  sol.x = sf.shift;
  for (std::size_t k = 0; k < ns; ++k) {
    sol.x[sf.columns[k].var] += sf.columns[k].sign * y[k] * col_scale[k];
  }
  sol.objective_value = 0.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) sol.objective_value += lp.objective[j] * sol.x[j];

  const double viol = max_relative_violation(lp, sol.x);
  if (viol > 10.0 * opts.feasibility_tol) {
    throw InternalError("simplex: returned point violates constraints by " + std::to_string(viol));
  }
  return sol;
}

}  // namespace bess::lp
