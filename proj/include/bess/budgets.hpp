#pragma once

// Interval-sequence algebra for per-service power and energy budgets.
//
// Sign convention used throughout the library: battery power is positive
// when the battery absorbs power from the feeder (charging), so stored
// energy grows with it. A dispatch offset F therefore charges the battery,
// and a prosumption realization L below the forecast L_hat leaves
// (L_hat - L) for the battery to absorb.

#include <cstddef>
#include <span>
#include <vector>

namespace bess {

/// Discretization of the scheduling window. `dt()` is in hours.
class TimeGrid {
 public:
  TimeGrid() : TimeGrid(24.0, 288) {}
  TimeGrid(double horizon_h, std::size_t slots);

  double horizon_h() const noexcept { return horizon_h_; }
  std::size_t slots() const noexcept { return slots_; }
  double dt() const noexcept { return dt_; }

  /// Slot length in whole seconds; throws if the slot is not an integral
  /// number of seconds.
  std::size_t seconds_per_slot() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_h_;
  std::size_t slots_;
  double dt_;
};

/// Per-slot [lower, upper] band. kW for power budgets, kWh for energy.
class IntervalSequence {
 public:
  IntervalSequence(std::vector<double> lower, std::vector<double> upper, TimeGrid grid);

  static IntervalSequence zero(const TimeGrid& grid);

  const std::vector<double>& lower() const noexcept { return lower_; }
  const std::vector<double>& upper() const noexcept { return upper_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return lower_.size(); }

  /// Same band translated by `offset` (kWh or kW) on both sides.
  IntervalSequence shifted(double offset) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
  TimeGrid grid_;
};

/// Day-ahead prosumption scenarios. All three profiles are absolute kW
/// values with lower <= forecast <= upper per slot.
struct LoadScenarios {
  std::vector<double> forecast;
  std::vector<double> upper;
  std::vector<double> lower;
  TimeGrid grid;

  /// Throws ValidationError/DimensionError on violated invariants.
  void validate() const;

  /// Battery-side dispatch requirement band [L_hat - L_up, L_hat - L_down]
  /// (kW, charging positive). Zero-width when the scenarios collapse onto
  /// the forecast.
  IntervalSequence battery_band() const;
};

struct FrParams {
  double f_nominal = 50.0;     // Hz
  double delta_f_max = 0.2;    // Hz, deviation for full reserve activation

  void validate() const;
};

struct FrequencyEnvelope;

std::vector<double> width(const IntervalSequence& e);

/// Slot-wise sum of budgets, accumulated in list order.
IntervalSequence sum_budgets(std::span<const IntervalSequence> budgets);

IntervalSequence dispatch_power_budget(std::span<const double> offset_kw,
                                       const LoadScenarios& scen);

IntervalSequence dispatch_energy_budget(std::span<const double> offset_kw,
                                        const LoadScenarios& scen, const TimeGrid& grid);

/// Constant band +-(delta_f_max * alpha) on every slot.
IntervalSequence fr_power_budget(double alpha, const FrParams& fr, const TimeGrid& grid);

/// [alpha * W_down_k, alpha * W_up_k] in kWh.
IntervalSequence fr_energy_budget(double alpha, const FrequencyEnvelope& env);

}  // namespace bess
