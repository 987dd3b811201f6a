#include "bess/scheduler.hpp"

#include <algorithm>
#include <cmath>

#include "bess/errors.hpp"

namespace bess {

void BessParams::validate() const {
  if (!std::isfinite(e_nom) || !std::isfinite(p_max) || !std::isfinite(e_min) ||
      !std::isfinite(e_max) || !std::isfinite(beta)) {
    throw ValidationError("BessParams: non-finite parameter");
  }
  if (!(0.0 <= e_min && e_min < e_max && e_max <= e_nom)) {
    throw ValidationError("BessParams: expected 0 <= e_min < e_max <= e_nom");
  }
  if (!(p_max > 0.0)) throw ValidationError("BessParams: p_max must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("BessParams: beta must be in (0, 1]");
}

void ScheduleInputs::validate() const {
  bess.validate();
  fr.validate();
  scen.validate();
  env.validate();
  if (!(scen.grid == grid) || !(env.grid == grid)) {
    throw DimensionError("ScheduleInputs: scenarios, envelope and grid disagree");
  }
  // The plan always starts from the measured state; [e_min, e_max] is a
  // target band that the LP restores, so only the physical range is required.
  if (!std::isfinite(e_init) || e_init < 0.0 || e_init > bess.e_nom) {
    throw ValidationError("ScheduleInputs: e_init must lie in [0, e_nom]");
  }
}

const char* to_string(ObjectiveMode m) {
  switch (m) {
    case ObjectiveMode::max_alpha: return "max-alpha";
    case ObjectiveMode::revenue: return "revenue";
    case ObjectiveMode::feasibility: return "feasibility";
  }
  return "?";
}

ObjectiveMode parse_objective_mode(const std::string& s) {
  if (s == "max-alpha") return ObjectiveMode::max_alpha;
  if (s == "revenue") return ObjectiveMode::revenue;
  if (s == "feasibility") return ObjectiveMode::feasibility;
  throw ValidationError("unknown objective mode '" + s + "' (max-alpha, revenue, feasibility)");
}

void RevenueModel::validate() const {
  if (!std::isfinite(price_fr) || !std::isfinite(price_dispatch)) {
    throw ValidationError("RevenueModel: prices must be finite");
  }
}

const char* to_string(FallbackStage s) {
  switch (s) {
    case FallbackStage::none: return "none";
    case FallbackStage::alpha_zero: return "alpha-zero";
    case FallbackStage::energy_relaxed: return "energy-relaxed";
  }
  return "?";
}

const char* to_string(BindingConstraint::Kind k) {
  switch (k) {
    case BindingConstraint::Kind::energy_upper: return "energy-upper";
    case BindingConstraint::Kind::energy_lower: return "energy-lower";
    case BindingConstraint::Kind::power_upper: return "power-upper";
    case BindingConstraint::Kind::power_lower: return "power-lower";
  }
  return "?";
}

std::vector<double> DayAheadPlan::forecast() const {
  std::vector<double> f(dispatch_plan.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = dispatch_plan[k] - offset[k];
  return f;
}

namespace {

// Rows (i)-(iv) for every slot, plus an optional slack column that widens
// the energy rows. Variable order: alpha, F_1..F_N[, s].
lp::LinearProgram assemble(const ScheduleInputs& in, bool energy_slack) {
  const std::size_t n = in.grid.slots();
  const double dt = in.grid.dt();
  const IntervalSequence band = in.scen.battery_band();
  const auto& d_lo = band.lower();
  const auto& d_hi = band.upper();
  const double df = in.fr.delta_f_max;
  const double pmax = in.bess.p_max;

  const std::size_t vars = 1 + n + (energy_slack ? 1 : 0);
  lp::LinearProgram lp = lp::LinearProgram::with_variables(vars);
  lp.constraints = lp::DenseMatrix(4 * n, vars);
  lp.rhs.assign(4 * n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    lp.var_lower[k] = -lp::kInf;
    lp.var_upper[k] = lp::kInf;
  }

  double cum_hi = 0.0;
  double cum_lo = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum_hi += d_hi[k];
    cum_lo += d_lo[k];
    const std::size_t r = 4 * k;

    // (i) energy ceiling
    lp.constraints(r, 0) = in.env.w_up[k];
    for (std::size_t i = 0; i <= k; ++i) lp.constraints(r, 1 + i) = dt;
    lp.rhs[r] = in.bess.e_max - in.e_init - dt * cum_hi;

    // (ii) energy floor, negated into <= form
    lp.constraints(r + 1, 0) = -in.env.w_down[k];
    for (std::size_t i = 0; i <= k; ++i) lp.constraints(r + 1, 1 + i) = -dt;
    lp.rhs[r + 1] = in.e_init - in.bess.e_min + dt * cum_lo;

    // (iii) power ceiling
    lp.constraints(r + 2, 0) = df;
    lp.constraints(r + 2, 1 + k) = 1.0;
    lp.rhs[r + 2] = pmax - d_hi[k];

    // (iv) power floor, negated
    lp.constraints(r + 3, 0) = df;
    lp.constraints(r + 3, 1 + k) = -1.0;
    lp.rhs[r + 3] = pmax + d_lo[k];

    if (energy_slack) {
      lp.constraints(r, n + 1) = -1.0;
      lp.constraints(r + 1, n + 1) = -1.0;
    }
  }
  return lp;
}

DayAheadPlan make_plan(const ScheduleInputs& in, const std::vector<double>& x) {
  const std::size_t n = in.grid.slots();
  DayAheadPlan plan;
  plan.alpha = std::max(0.0, x[0]);
  plan.offset.assign(x.begin() + 1, x.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  plan.dispatch_plan.resize(n);
  for (std::size_t k = 0; k < n; ++k) plan.dispatch_plan[k] = in.scen.forecast[k] + plan.offset[k];
  return plan;
}

double revenue_of(const ScheduleInputs& in, const RevenueModel& rev, double alpha) {
  const IntervalSequence band = in.scen.battery_band();
  double width_n = 0.0;
  for (double w : width(band)) width_n += w;
  return rev.price_fr * alpha + rev.price_dispatch * in.grid.dt() * width_n;
}

}  // namespace

lp::LinearProgram build_lp(const ScheduleInputs& inputs, ObjectiveMode mode,
                           const RevenueModel& revenue) {
  inputs.validate();
  revenue.validate();
  lp::LinearProgram lp = assemble(inputs, /*energy_slack=*/false);
  switch (mode) {
    case ObjectiveMode::max_alpha:
      lp.objective[0] = 1.0;
      break;
    case ObjectiveMode::revenue:
      // the dispatch term depends on the scenarios only, so it shifts the
      // objective by a constant and is added back in the reported revenue
      lp.objective[0] = revenue.price_fr;
      break;
    case ObjectiveMode::feasibility:
      break;
  }
  return lp;
}

DayAheadPlan solve_day_ahead(const ScheduleInputs& inputs, ObjectiveMode mode,
                             const RevenueModel& revenue, const lp::SolverOptions& opts) {
  lp::LinearProgram full = build_lp(inputs, mode, revenue);
  lp::Solution sol = lp::solve(full, opts);
  if (sol.status == lp::Status::unbounded) {
    throw InternalError("solve_day_ahead: LP unbounded; check p_max and delta_f_max");
  }
  if (sol.status == lp::Status::optimal) {
    DayAheadPlan plan = make_plan(inputs, sol.x);
    plan.revenue = revenue_of(inputs, revenue, plan.alpha);
    return plan;
  }

  // No PFR for the day: alpha pinned to zero, any feasible offset.
  lp::LinearProgram no_fr = build_lp(inputs, ObjectiveMode::feasibility, revenue);
  no_fr.var_upper[0] = 0.0;
  sol = lp::solve(no_fr, opts);
  if (sol.status == lp::Status::optimal) {
    DayAheadPlan plan = make_plan(inputs, sol.x);
    plan.alpha = 0.0;
    plan.fallback_used = true;
    plan.stage = FallbackStage::alpha_zero;
    plan.revenue = revenue_of(inputs, revenue, 0.0);
    return plan;
  }

  // Still infeasible: widen both energy bounds by the smallest common margin.
  lp::LinearProgram relaxed = assemble(inputs, /*energy_slack=*/true);
  relaxed.var_upper[0] = 0.0;
  relaxed.objective.back() = -1.0;
  sol = lp::solve(relaxed, opts);
  if (sol.status != lp::Status::optimal) {
    throw InfeasibleError(
        "solve_day_ahead: dispatch power band exceeds the converter rating; no executable plan");
  }
  DayAheadPlan plan = make_plan(inputs, sol.x);
  plan.alpha = 0.0;
  plan.fallback_used = true;
  plan.stage = FallbackStage::energy_relaxed;
  plan.relaxation_kwh = std::max(0.0, sol.x.back());
  plan.revenue = revenue_of(inputs, revenue, 0.0);
  return plan;
}

std::vector<BindingConstraint> constraint_slacks(const ScheduleInputs& in,
                                                 const DayAheadPlan& plan) {
  const std::size_t n = in.grid.slots();
  if (plan.offset.size() != n) throw DimensionError("constraint_slacks: plan length mismatch");
  const double dt = in.grid.dt();
  const double df = in.fr.delta_f_max;
  std::vector<BindingConstraint> out;
  out.reserve(4 * n);
  double sum_hi = 0.0;
  double sum_lo = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d_hi = in.scen.forecast[k] - in.scen.lower[k];
    const double d_lo = in.scen.forecast[k] - in.scen.upper[k];
    sum_hi += plan.offset[k] + d_hi;
    sum_lo += plan.offset[k] + d_lo;
    const double e_hi = in.e_init + dt * sum_hi + plan.alpha * in.env.w_up[k];
    const double e_lo = in.e_init + dt * sum_lo + plan.alpha * in.env.w_down[k];
    using K = BindingConstraint::Kind;
    out.push_back({K::energy_upper, k, in.bess.e_max - e_hi});
    out.push_back({K::energy_lower, k, e_lo - in.bess.e_min});
    out.push_back({K::power_upper, k, in.bess.p_max - (plan.offset[k] + d_hi + df * plan.alpha)});
    out.push_back({K::power_lower, k, (plan.offset[k] + d_lo - df * plan.alpha) + in.bess.p_max});
  }
  return out;
}

std::vector<BindingConstraint> binding_constraints(const ScheduleInputs& inputs,
                                                   const DayAheadPlan& plan, double tol) {
  std::vector<BindingConstraint> all = constraint_slacks(inputs, plan);
  std::erase_if(all, [tol](const BindingConstraint& c) { return c.slack > tol; });
  return all;
}

double max_efficiency_drift(std::span<const std::vector<double>> profiles, double beta,
                            double dt_h) {
  if (profiles.empty()) throw ValidationError("max_efficiency_drift: empty scenario set");
  if (!(beta > 0.0 && beta <= 1.0)) throw ValidationError("max_efficiency_drift: beta out of (0, 1]");
  if (!(dt_h > 0.0)) throw ValidationError("max_efficiency_drift: dt must be positive");
  double worst = 0.0;
  for (const auto& b : profiles) {
    if (b.empty()) throw ValidationError("max_efficiency_drift: empty power profile");
    double ideal = 0.0;
    double lossy = 0.0;
    for (double p : b) {
      ideal += p;
      lossy += (p >= 0.0 ? beta : 1.0 / beta) * p;
    }
    worst = std::max(worst, std::abs(dt_h * ideal - dt_h * lossy));
  }
  return worst;
}

double calibrate_e_min(std::span<const std::vector<double>> profiles, const BessParams& bess,
                       double dt_h) {
  const double drift = max_efficiency_drift(profiles, bess.beta, dt_h);
  if (drift <= 0.0) return 0.0;
  const double percent = 100.0 * drift / bess.e_nom;
  return (std::floor(percent + 1e-9) + 1.0) / 100.0 * bess.e_nom;
}

}  // namespace bess
