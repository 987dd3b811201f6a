#include "bess/realtime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bess/errors.hpp"

namespace bess {

namespace {

constexpr std::size_t kHistoryLimit = 600;

}  // namespace

SaturationLimits saturation_limits(double alpha, double p_max, const FrParams& fr) {
  if (!(p_max > 0.0)) throw ValidationError("saturation_limits: p_max must be positive");
  if (!(alpha >= 0.0)) throw ValidationError("saturation_limits: alpha must be non-negative");
  const double fr_raw = std::min(fr.delta_f_max * alpha, p_max);
  SaturationLimits lim;
  lim.dispatch_kw = p_max - fr_raw;
  // P - (P - x) is exact for 0 <= x <= P, so the two thresholds add up to
  // p_max without rounding.
  lim.fr_kw = p_max - lim.dispatch_kw;
  return lim;
}

double fr_setpoint(double f_hz, const DayAheadPlan& plan, const FrParams& fr) {
  const double limit = fr.delta_f_max * plan.alpha;
  return std::clamp(plan.alpha * (f_hz - fr.f_nominal), -limit, limit);
}

DispatchCommand dispatch_setpoint(const ControllerState& state, double p_hat_kw,
                                  double forecast_remaining_kws, std::size_t seconds_per_slot,
                                  double limit_kw) {
  if (state.second_in_slot >= seconds_per_slot) {
    throw ValidationError("dispatch_setpoint: second " + std::to_string(state.second_in_slot) +
                          " overruns a " + std::to_string(seconds_per_slot) + " s slot");
  }
  const double S = static_cast<double>(seconds_per_slot);
  DispatchCommand cmd;
  cmd.eps_kw = p_hat_kw - (state.accumulated_kws + forecast_remaining_kws) / S;
  const double raw = cmd.eps_kw * S / (S - static_cast<double>(state.second_in_slot));
  cmd.kw = std::clamp(raw, -limit_kw, limit_kw);
  cmd.saturated = cmd.kw != raw;
  return cmd;
}

ShortTermForecaster persistence_forecaster(std::size_t window_s) {
  if (window_s == 0) throw ValidationError("persistence_forecaster: window must be positive");
  return [window_s](const ForecastQuery& q) {
    const auto& h = q.recent_prosumption_kw;
    if (h.empty()) return q.day_ahead_kw;
    const std::size_t take = std::min(window_s, h.size());
    double sum = 0.0;
    for (std::size_t i = h.size() - take; i < h.size(); ++i) sum += h[i];
    return sum / static_cast<double>(take);
  };
}

RealtimeController::RealtimeController(DayAheadPlan plan, double p_max, FrParams fr,
                                       std::size_t seconds_per_slot,
                                       ShortTermForecaster forecaster)
    : plan_(std::move(plan)),
      fr_(fr),
      sps_(seconds_per_slot),
      forecaster_(std::move(forecaster)) {
  fr_.validate();
  if (sps_ == 0) throw ValidationError("RealtimeController: slot length must be positive");
  if (plan_.offset.size() != plan_.dispatch_plan.size()) {
    throw DimensionError("RealtimeController: plan offset and dispatch plan lengths differ");
  }
  if (!forecaster_) throw ValidationError("RealtimeController: missing short-term forecaster");
  limits_ = saturation_limits(plan_.alpha, p_max, fr_);
  day_ahead_ = plan_.forecast();
}

Setpoint RealtimeController::compute(double f_hz) {
  if (finished()) throw ValidationError("RealtimeController: slot overrun past end of plan");
  if (pending_) throw ValidationError("RealtimeController: previous setpoint not committed");

  Setpoint sp;
  if (std::isfinite(f_hz)) {
    const double raw = plan_.alpha * (f_hz - fr_.f_nominal);
    sp.b_fr = std::clamp(raw, -limits_.fr_kw, limits_.fr_kw);
    sp.fr_saturated = sp.b_fr != raw;
    last_b_fr_ = sp.b_fr;
  } else {
    sp.b_fr = last_b_fr_;
    sp.data_quality_event = true;
    ++dq_events_;
  }

  const std::size_t k = state_.slot_index;
  ForecastQuery q;
  q.slot = k;
  q.second_in_slot = state_.second_in_slot;
  q.remaining_s = sps_ - state_.second_in_slot;
  q.day_ahead_kw = day_ahead_[k];
  q.recent_prosumption_kw = history_;
  const double remaining = forecaster_(q) * static_cast<double>(q.remaining_s);

  const DispatchCommand d =
      dispatch_setpoint(state_, plan_.dispatch_plan[k], remaining, sps_, limits_.dispatch_kw);
  sp.b_dispatch = d.kw;
  sp.eps_kw = d.eps_kw;
  sp.dispatch_saturated = d.saturated;
  sp.b_total = sp.b_dispatch + sp.b_fr;
  pending_ = sp;
  return sp;
}

std::optional<SlotClose> RealtimeController::commit(double measured_feeder_kw,
                                                     std::optional<double> applied_kw) {
  if (!pending_) throw ValidationError("RealtimeController: commit without a computed setpoint");
  const Setpoint sp = *pending_;
  pending_.reset();

  // commanded B_fr is removed from the meter reading; the prosumption
  // estimate uses whatever the battery really delivered
  state_.accumulated_kws += measured_feeder_kw - sp.b_fr;
  history_.push_back(measured_feeder_kw - applied_kw.value_or(sp.b_total));
  if (history_.size() > kHistoryLimit) {
    history_.erase(history_.begin(), history_.begin() + static_cast<std::ptrdiff_t>(kHistoryLimit / 2));
  }

  if (++state_.second_in_slot < sps_) return std::nullopt;

  SlotClose close;
  close.slot = state_.slot_index;
  close.mean_net_kw = state_.accumulated_kws / static_cast<double>(sps_);
  close.eps_kw = close.mean_net_kw - plan_.dispatch_plan[state_.slot_index];
  ++state_.slot_index;
  state_.second_in_slot = 0;
  state_.accumulated_kws = 0.0;
  return close;
}

}  // namespace bess
