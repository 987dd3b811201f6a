#pragma once

// One-second control loop stacking dispatch tracking and droop-based PFR.
//
// Each second the controller is asked for a setpoint (`compute`) and then
// told what the feeder meter saw during that second (`commit`). Battery
// power is positive when charging, so the feeder meter reads
// P = prosumption + B.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bess/budgets.hpp"
#include "bess/scheduler.hpp"

namespace bess {

/// Saturation thresholds; fr_kw + dispatch_kw == p_max exactly.
struct SaturationLimits {
  double fr_kw = 0.0;
  double dispatch_kw = 0.0;
};

SaturationLimits saturation_limits(double alpha, double p_max, const FrParams& fr);

/// alpha * (f - f_n) clamped to +-delta_f_max * alpha.
double fr_setpoint(double f_hz, const DayAheadPlan& plan, const FrParams& fr);

struct ControllerState {
  std::size_t slot_index = 0;
  std::size_t second_in_slot = 0;
  double accumulated_kws = 0.0;  // sum of (P_i - B_fr,i) so far in the slot
};

struct DispatchCommand {
  double kw = 0.0;
  double eps_kw = 0.0;  // slot-average power error still to be corrected
  bool saturated = false;
};

/// eps = P_hat - (accumulated + forecast_remaining) / S, spread over the
/// S - s seconds left in the slot and clamped to +-limit_kw.
DispatchCommand dispatch_setpoint(const ControllerState& state, double p_hat_kw,
                                  double forecast_remaining_kws, std::size_t seconds_per_slot,
                                  double limit_kw);

struct Setpoint {
  double b_dispatch = 0.0;
  double b_fr = 0.0;
  double b_total = 0.0;
  double eps_kw = 0.0;
  bool fr_saturated = false;
  bool dispatch_saturated = false;
  bool data_quality_event = false;
};

struct ForecastQuery {
  std::size_t slot = 0;
  std::size_t second_in_slot = 0;
  std::size_t remaining_s = 0;
  double day_ahead_kw = 0.0;                     // L_hat for the slot
  std::span<const double> recent_prosumption_kw; // oldest first
};

/// Returns the mean prosumption (kW) expected over the remaining seconds.
using ShortTermForecaster = std::function<double(const ForecastQuery&)>;

/// Mean of the last `window_s` prosumption estimates; the day-ahead value
/// until any measurement exists.
ShortTermForecaster persistence_forecaster(std::size_t window_s = 10);

struct SlotClose {
  std::size_t slot = 0;
  double mean_net_kw = 0.0;  // slot average of (P - B_fr)
  double eps_kw = 0.0;       // mean_net_kw - P_hat
};

class RealtimeController {
 public:
  RealtimeController(DayAheadPlan plan, double p_max, FrParams fr, std::size_t seconds_per_slot,
                     ShortTermForecaster forecaster = persistence_forecaster());

  /// Setpoint for the current second. Throws ValidationError past the last
  /// slot or when the previous setpoint was never committed.
  Setpoint compute(double f_hz);

  /// Feeder power measured while the last setpoint was applied. `applied_kw`
  /// is the battery power actually delivered when the plant clamped it.
  std::optional<SlotClose> commit(double measured_feeder_kw,
                                  std::optional<double> applied_kw = std::nullopt);

  const ControllerState& state() const noexcept { return state_; }
  const SaturationLimits& limits() const noexcept { return limits_; }
  const DayAheadPlan& plan() const noexcept { return plan_; }
  std::size_t data_quality_events() const noexcept { return dq_events_; }
  bool finished() const noexcept { return state_.slot_index >= plan_.dispatch_plan.size(); }

 private:
  DayAheadPlan plan_;
  std::vector<double> day_ahead_;
  FrParams fr_;
  std::size_t sps_;
  SaturationLimits limits_;
  ShortTermForecaster forecaster_;
  ControllerState state_;
  std::vector<double> history_;
  double last_b_fr_ = 0.0;
  std::optional<Setpoint> pending_;
  std::size_t dq_events_ = 0;
};

}  // namespace bess
