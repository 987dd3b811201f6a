#include "bess/budgets.hpp"

#include <cmath>
#include <string>

#include "bess/errors.hpp"
#include "bess/freq_stats.hpp"

namespace bess {

TimeGrid::TimeGrid(double horizon_h, std::size_t slots)
    : horizon_h_(horizon_h), slots_(slots), dt_(0.0) {
  if (slots == 0) throw ValidationError("TimeGrid: slot count must be at least 1");
  if (!(horizon_h > 0.0) || !std::isfinite(horizon_h)) {
    throw ValidationError("TimeGrid: horizon must be positive and finite");
  }
  dt_ = horizon_h / static_cast<double>(slots);
  if (dt_ * static_cast<double>(slots) != horizon_h) {
    throw ValidationError("TimeGrid: horizon " + std::to_string(horizon_h) +
                          " h is not an exact multiple of the slot length");
  }
}

std::size_t TimeGrid::seconds_per_slot() const {
  const double s = dt_ * 3600.0;
  const double r = std::round(s);
  if (r < 1.0 || std::abs(s - r) > 1e-9) {
    throw ValidationError("TimeGrid: slot length is not a whole number of seconds");
  }
  return static_cast<std::size_t>(r);
}

IntervalSequence::IntervalSequence(std::vector<double> lower, std::vector<double> upper,
                                   TimeGrid grid)
    : lower_(std::move(lower)), upper_(std::move(upper)), grid_(grid) {
  if (lower_.size() != grid_.slots() || upper_.size() != grid_.slots()) {
    throw DimensionError("IntervalSequence: expected " + std::to_string(grid_.slots()) +
                         " slots, got " + std::to_string(lower_.size()) + "/" +
                         std::to_string(upper_.size()));
  }
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    if (!(lower_[k] <= upper_[k])) {
      throw ValidationError("IntervalSequence: lower > upper at slot " + std::to_string(k));
    }
  }
}

IntervalSequence IntervalSequence::zero(const TimeGrid& grid) {
  return IntervalSequence(std::vector<double>(grid.slots(), 0.0),
                          std::vector<double>(grid.slots(), 0.0), grid);
}

IntervalSequence IntervalSequence::shifted(double offset) const {
  std::vector<double> lo = lower_;
  std::vector<double> hi = upper_;
  for (double& v : lo) v += offset;
  for (double& v : hi) v += offset;
  return IntervalSequence(std::move(lo), std::move(hi), grid_);
}

void LoadScenarios::validate() const {
  const std::size_t n = grid.slots();
  if (forecast.size() != n || upper.size() != n || lower.size() != n) {
    throw DimensionError("LoadScenarios: profiles must have " + std::to_string(n) + " slots");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(forecast[k]) || !std::isfinite(upper[k]) || !std::isfinite(lower[k])) {
      throw ValidationError("LoadScenarios: non-finite value at slot " + std::to_string(k));
    }
    if (!(lower[k] <= forecast[k] && forecast[k] <= upper[k])) {
      throw ValidationError("LoadScenarios: expected lower <= forecast <= upper at slot " +
                            std::to_string(k));
    }
  }
}

IntervalSequence LoadScenarios::battery_band() const {
  validate();
  std::vector<double> lo(grid.slots());
  std::vector<double> hi(grid.slots());
  for (std::size_t k = 0; k < grid.slots(); ++k) {
    lo[k] = forecast[k] - upper[k];
    hi[k] = forecast[k] - lower[k];
  }
  return IntervalSequence(std::move(lo), std::move(hi), grid);
}

void FrParams::validate() const {
  if (!(delta_f_max > 0.0) || !std::isfinite(delta_f_max)) {
    throw ValidationError("FrParams: delta_f_max must be positive");
  }
  if (!(f_nominal > 0.0) || !std::isfinite(f_nominal)) {
    throw ValidationError("FrParams: f_nominal must be positive");
  }
}

std::vector<double> width(const IntervalSequence& e) {
  std::vector<double> w(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) w[k] = e.upper()[k] - e.lower()[k];
  return w;
}

IntervalSequence sum_budgets(std::span<const IntervalSequence> budgets) {
  if (budgets.empty()) throw ValidationError("sum_budgets: empty list");
  const TimeGrid& grid = budgets.front().grid();
  std::vector<double> lo(grid.slots(), 0.0);
  std::vector<double> hi(grid.slots(), 0.0);
  for (const IntervalSequence& b : budgets) {
    if (!(b.grid() == grid)) throw DimensionError("sum_budgets: budgets use different time grids");
    for (std::size_t k = 0; k < lo.size(); ++k) {
      lo[k] += b.lower()[k];
      hi[k] += b.upper()[k];
    }
  }
  return IntervalSequence(std::move(lo), std::move(hi), grid);
}

namespace {

void check_offset(std::span<const double> offset, const TimeGrid& grid, const char* who) {
  if (offset.size() != grid.slots()) {
    throw DimensionError(std::string(who) + ": offset has " + std::to_string(offset.size()) +
                         " slots, grid has " + std::to_string(grid.slots()));
  }
}

}  // namespace

IntervalSequence dispatch_power_budget(std::span<const double> offset_kw,
                                       const LoadScenarios& scen) {
  check_offset(offset_kw, scen.grid, "dispatch_power_budget");
  const IntervalSequence band = scen.battery_band();
  std::vector<double> lo(band.size());
  std::vector<double> hi(band.size());
  for (std::size_t k = 0; k < band.size(); ++k) {
    lo[k] = offset_kw[k] + band.lower()[k];
    hi[k] = offset_kw[k] + band.upper()[k];
  }
  return IntervalSequence(std::move(lo), std::move(hi), scen.grid);
}

IntervalSequence dispatch_energy_budget(std::span<const double> offset_kw,
                                        const LoadScenarios& scen, const TimeGrid& grid) {
  if (!(scen.grid == grid)) throw DimensionError("dispatch_energy_budget: grid mismatch");
  const IntervalSequence power = dispatch_power_budget(offset_kw, scen);
  std::vector<double> lo(power.size());
  std::vector<double> hi(power.size());
  double sum_lo = 0.0;
  double sum_hi = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    sum_lo += power.lower()[k];
    sum_hi += power.upper()[k];
    lo[k] = grid.dt() * sum_lo;
    hi[k] = grid.dt() * sum_hi;
  }
  return IntervalSequence(std::move(lo), std::move(hi), grid);
}

IntervalSequence fr_power_budget(double alpha, const FrParams& fr, const TimeGrid& grid) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("fr_power_budget: alpha must be finite and non-negative");
  }
  fr.validate();
  const double p = fr.delta_f_max * alpha;
  return IntervalSequence(std::vector<double>(grid.slots(), -p),
                          std::vector<double>(grid.slots(), p), grid);
}

IntervalSequence fr_energy_budget(double alpha, const FrequencyEnvelope& env) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("fr_energy_budget: alpha must be finite and non-negative");
  }
  env.validate();
  std::vector<double> lo(env.grid.slots());
  std::vector<double> hi(env.grid.slots());
  for (std::size_t k = 0; k < lo.size(); ++k) {
    lo[k] = alpha * env.w_down[k];
    hi[k] = alpha * env.w_up[k];
  }
  return IntervalSequence(std::move(lo), std::move(hi), env.grid);
}

}  // namespace bess
