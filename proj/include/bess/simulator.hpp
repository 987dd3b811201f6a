#pragma once

// Closed-loop day and multi-day simulation: schedule, then run the 1 s
// controller against realized prosumption and frequency with the plant in
// the loop. Stored energy is chained from one day to the next.

#include <cstdint>
#include <functional>
#include <vector>

#include "bess/budgets.hpp"
#include "bess/freq_stats.hpp"
#include "bess/lp_solver.hpp"
#include "bess/scheduler.hpp"

namespace bess {

struct DayRealization {
  std::vector<double> load_kw;  // 1 Hz prosumption, without the battery
  std::vector<double> freq_hz;  // 1 Hz grid frequency
};

struct TraceRow {
  std::int64_t epoch_s = 0;
  std::size_t slot = 0;
  double f_hz = 0.0;
  double feeder_kw = 0.0;
  double b_fr_kw = 0.0;
  double b_d_kw = 0.0;
  double b_total_kw = 0.0;
  double soe_kwh = 0.0;
  double eps_kw = 0.0;
};

using TraceSink = std::function<void(const TraceRow&)>;

struct SimulationOptions {
  ObjectiveMode mode = ObjectiveMode::max_alpha;
  RevenueModel revenue;
  lp::SolverOptions solver;
  /// Use the realized prosumption as the short-term forecast.
  bool perfect_forecast = false;
  std::size_t persistence_window_s = 10;
  /// Epoch of the first simulated second.
  std::int64_t epoch_start = 0;
  /// Keep the 1 s battery power profile in DayResult::battery_kw.
  bool keep_power_profile = false;
};

struct DayResult {
  std::size_t day = 0;          // 1-based within a horizon
  double soe_0 = 0.0;           // % of E_nom
  double alpha = 0.0;           // kW/Hz
  double f_avg = 0.0;           // kW
  double soe_min = 0.0;         // %
  double soe_max = 0.0;         // %
  double eps_mean = 0.0;        // kW, over 5-min slots
  double eps_rms = 0.0;
  double eps_max = 0.0;         // largest |eps|
  bool fallback_used = false;
  FallbackStage stage = FallbackStage::none;

  double soe_end_kwh = 0.0;
  double max_excursion_kwh = 0.0;  // largest exit from [e_min, e_max]
  std::size_t clamp_events = 0;
  std::size_t data_quality_events = 0;
  std::size_t dispatch_saturated_s = 0;
  std::size_t fr_saturated_s = 0;

  std::vector<double> slot_eps_kw;
  std::vector<double> soe_slot_kwh;  // stored energy at the end of each slot
  IntervalSequence budget_trace = IntervalSequence::zero(TimeGrid{});    // E_init + E_D + E_FR
  IntervalSequence dispatch_trace = IntervalSequence::zero(TimeGrid{});  // E_init + E_D
  DayAheadPlan plan;
  std::vector<double> battery_kw;
};

DayResult run_day(const ScheduleInputs& inputs, const DayRealization& realized,
                  const SimulationOptions& opts = {}, const TraceSink& sink = {});

/// Same, executing a plan computed elsewhere.
DayResult run_day(const ScheduleInputs& inputs, const DayAheadPlan& plan,
                  const DayRealization& realized, const SimulationOptions& opts = {},
                  const TraceSink& sink = {});

struct DayCase {
  LoadScenarios scen;
  FrequencyEnvelope env;
  DayRealization realized;
};

struct AggregateRow {
  double soe_0 = 0.0;
  double alpha = 0.0;
  double f_avg = 0.0;
  double soe_min = 0.0;
  double soe_max = 0.0;
  double eps_mean = 0.0;
  double eps_rms = 0.0;
  double eps_max = 0.0;
};

struct HorizonReport {
  std::vector<DayResult> days;
  AggregateRow mean;
  AggregateRow max;
  AggregateRow min;

  std::vector<std::size_t> fallback_days() const;
};

/// Mean/max/min rows over the given days, in day order.
void compute_aggregates(HorizonReport& report);

struct HorizonSetup {
  BessParams bess;
  FrParams fr;
  TimeGrid grid;
  double soe_start_kwh = 280.0;
};

using DayTraceSink = std::function<void(std::size_t day, const TraceRow&)>;

HorizonReport run_horizon(const std::vector<DayCase>& days, const HorizonSetup& setup,
                          const SimulationOptions& opts = {}, const DayTraceSink& sink = {});

}  // namespace bess
