#pragma once

// Day-ahead allocation of battery capacity between feeder dispatch and
// primary frequency regulation.
//
// Decision vector: [alpha, F_1 .. F_N]. For every slot k the LP holds
//   (i)   E_init + dt*sum_{i<=k}(F_i + d_up_i)   + alpha*W_up_k   <= E_max
//   (ii)  E_init + dt*sum_{i<=k}(F_i + d_down_i) + alpha*W_down_k >= E_min
//   (iii) F_k + d_up_k   + df_max*alpha <=  P_max
//   (iv)  F_k + d_down_k - df_max*alpha >= -P_max
// with [d_down, d_up] = LoadScenarios::battery_band().

#include <span>
#include <string>
#include <vector>

#include "bess/budgets.hpp"
#include "bess/freq_stats.hpp"
#include "bess/lp_solver.hpp"

namespace bess {

struct BessParams {
  double e_nom = 560.0;   // kWh
  double p_max = 720.0;   // kW
  double e_min = 28.0;    // kWh, scheduling floor
  double e_max = 560.0;   // kWh, scheduling ceiling
  double beta = 0.96;     // charge/discharge efficiency split

  void validate() const;
};

struct ScheduleInputs {
  BessParams bess;
  double e_init = 280.0;  // kWh
  LoadScenarios scen;
  FrequencyEnvelope env;
  FrParams fr;
  TimeGrid grid;

  void validate() const;
};

enum class ObjectiveMode { max_alpha, revenue, feasibility };

const char* to_string(ObjectiveMode m);
ObjectiveMode parse_objective_mode(const std::string& s);

/// Linear price-taking revenue. price_fr is per kW/Hz of alpha, price_dispatch
/// per kWh of end-of-day dispatch band width.
struct RevenueModel {
  double price_fr = 1.0;
  double price_dispatch = 0.0;

  void validate() const;
};

enum class FallbackStage {
  none,
  alpha_zero,       // alpha fixed to 0, F re-solved
  energy_relaxed,   // alpha = 0 and energy bounds widened by the minimal margin
};

const char* to_string(FallbackStage s);

struct DayAheadPlan {
  double alpha = 0.0;                 // kW/Hz
  std::vector<double> offset;         // F, kW
  std::vector<double> dispatch_plan;  // P_hat = L_hat + F, kW
  bool fallback_used = false;
  FallbackStage stage = FallbackStage::none;
  double relaxation_kwh = 0.0;        // only for energy_relaxed
  double revenue = 0.0;

  /// Forecast implied by the plan (P_hat - F).
  std::vector<double> forecast() const;
};

lp::LinearProgram build_lp(const ScheduleInputs& inputs, ObjectiveMode mode,
                           const RevenueModel& revenue = {});

DayAheadPlan solve_day_ahead(const ScheduleInputs& inputs, ObjectiveMode mode,
                             const RevenueModel& revenue = {},
                             const lp::SolverOptions& opts = {});

/// Constraint of the day-ahead problem that is active at a plan.
struct BindingConstraint {
  enum class Kind { energy_upper, energy_lower, power_upper, power_lower };
  Kind kind;
  std::size_t slot;
  double slack;
};

const char* to_string(BindingConstraint::Kind k);

/// Slacks of (i)-(iv) re-evaluated from the raw inputs. Negative values are
/// violations.
std::vector<BindingConstraint> constraint_slacks(const ScheduleInputs& inputs,
                                                 const DayAheadPlan& plan);

std::vector<BindingConstraint> binding_constraints(const ScheduleInputs& inputs,
                                                   const DayAheadPlan& plan, double tol = 1e-6);

/// Largest |E_ideal,N - E_lossy,N| over the given battery power profiles
/// (kW, charging positive, one sample per dt_h).
double max_efficiency_drift(std::span<const std::vector<double>> profiles, double beta,
                            double dt_h);

/// Scheduling floor that absorbs the worst observed efficiency drift: the
/// next whole percent of E_nom strictly above the drift, or 0 when the
/// drift is 0.
double calibrate_e_min(std::span<const std::vector<double>> profiles, const BessParams& bess,
                       double dt_h);

}  // namespace bess
