#include "bess/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "bess/errors.hpp"
#include "bess/plant.hpp"
#include "bess/realtime.hpp"

namespace bess {

namespace {

IntervalSequence absolute(const IntervalSequence& budget, double e_init) {
  return budget.shifted(e_init);
}

}  // namespace

DayResult run_day(const ScheduleInputs& inputs, const DayRealization& realized,
                  const SimulationOptions& opts, const TraceSink& sink) {
  inputs.validate();
  return run_day(inputs, solve_day_ahead(inputs, opts.mode, opts.revenue, opts.solver), realized,
                 opts, sink);
}

DayResult run_day(const ScheduleInputs& inputs, const DayAheadPlan& day_plan,
                  const DayRealization& realized, const SimulationOptions& opts,
                  const TraceSink& sink) {
  inputs.validate();
  if (day_plan.offset.size() != inputs.grid.slots() ||
      day_plan.dispatch_plan.size() != inputs.grid.slots()) {
    throw DimensionError("run_day: plan length differs from the number of slots");
  }
  const TimeGrid& grid = inputs.grid;
  const std::size_t sps = grid.seconds_per_slot();
  const std::size_t seconds = sps * grid.slots();
  if (realized.load_kw.size() != seconds || realized.freq_hz.size() != seconds) {
    throw DimensionError("run_day: realizations must hold " + std::to_string(seconds) +
                         " one-second samples");
  }

  DayResult res;
  res.plan = day_plan;
  const DayAheadPlan& plan = res.plan;

  ShortTermForecaster forecaster = persistence_forecaster(opts.persistence_window_s);
  if (opts.perfect_forecast) {
    forecaster = [&realized, sps](const ForecastQuery& q) {
      const std::size_t begin = q.slot * sps + q.second_in_slot;
      double sum = 0.0;
      for (std::size_t i = 0; i < q.remaining_s; ++i) sum += realized.load_kw[begin + i];
      return sum / static_cast<double>(q.remaining_s);
    };
  }
  RealtimeController ctl(plan, inputs.bess.p_max, inputs.fr, sps, forecaster);

  PlantState plant;
  plant.bess = inputs.bess;
  plant.soe = inputs.e_init;
  const double dt_h = 1.0 / 3600.0;

  double soe_lo = plant.soe;
  double soe_hi = plant.soe;
  auto excursion = [&](double soe) {
    return std::max({0.0, inputs.bess.e_min - soe, soe - inputs.bess.e_max});
  };
  res.max_excursion_kwh = excursion(plant.soe);
  res.soe_slot_kwh.reserve(grid.slots());
  res.slot_eps_kw.reserve(grid.slots());
  if (opts.keep_power_profile) res.battery_kw.reserve(seconds);

  for (std::size_t s = 0; s < seconds; ++s) {
    const Setpoint sp = ctl.compute(realized.freq_hz[s]);
    const PlantStep step = apply_power(plant, sp.b_total, dt_h);
    plant = step.next;
    const double feeder = realized.load_kw[s] + step.applied_kw;
    const std::size_t slot = ctl.state().slot_index;
    const auto closed = ctl.commit(feeder, step.applied_kw);

    soe_lo = std::min(soe_lo, plant.soe);
    soe_hi = std::max(soe_hi, plant.soe);
    res.max_excursion_kwh = std::max(res.max_excursion_kwh, excursion(plant.soe));
    if (sp.dispatch_saturated) ++res.dispatch_saturated_s;
    if (sp.fr_saturated) ++res.fr_saturated_s;
    if (opts.keep_power_profile) res.battery_kw.push_back(step.applied_kw);
    if (closed) {
      res.slot_eps_kw.push_back(closed->eps_kw);
      res.soe_slot_kwh.push_back(plant.soe);
    }
    if (sink) {
      TraceRow row;
      row.epoch_s = opts.epoch_start + static_cast<std::int64_t>(s);
      row.slot = slot;
      row.f_hz = realized.freq_hz[s];
      row.feeder_kw = feeder;
      row.b_fr_kw = sp.b_fr;
      row.b_d_kw = sp.b_dispatch;
      row.b_total_kw = sp.b_total;
      row.soe_kwh = plant.soe;
      row.eps_kw = sp.eps_kw;
      sink(row);
    }
  }

  const double e_nom = inputs.bess.e_nom;
  res.soe_0 = 100.0 * inputs.e_init / e_nom;
  res.alpha = plan.alpha;
  double f_sum = 0.0;
  for (double f : plan.offset) f_sum += f;
  res.f_avg = f_sum / static_cast<double>(plan.offset.size());
  res.soe_min = 100.0 * soe_lo / e_nom;
  res.soe_max = 100.0 * soe_hi / e_nom;
  res.fallback_used = plan.fallback_used;
  res.stage = plan.stage;
  res.soe_end_kwh = plant.soe;
  res.clamp_events = plant.clamp_events;
  res.data_quality_events = ctl.data_quality_events();

  double sum = 0.0;
  double sq = 0.0;
  double mx = 0.0;
  for (double e : res.slot_eps_kw) {
    sum += e;
    sq += e * e;
    mx = std::max(mx, std::abs(e));
  }
  const double count = static_cast<double>(res.slot_eps_kw.size());
  res.eps_mean = sum / count;
  res.eps_rms = std::sqrt(sq / count);
  res.eps_max = mx;

  const IntervalSequence e_d = dispatch_energy_budget(plan.offset, inputs.scen, grid);
  const IntervalSequence e_fr = fr_energy_budget(plan.alpha, inputs.env);
  const IntervalSequence parts[] = {e_d, e_fr};
  res.dispatch_trace = absolute(e_d, inputs.e_init);
  res.budget_trace = absolute(sum_budgets(parts), inputs.e_init);
  return res;
}

std::vector<std::size_t> HorizonReport::fallback_days() const {
  std::vector<std::size_t> out;
  for (const DayResult& d : days) {
    if (d.fallback_used) out.push_back(d.day);
  }
  return out;
}

void compute_aggregates(HorizonReport& report) {
  if (report.days.empty()) throw ValidationError("compute_aggregates: no days");
  auto fields = [](const DayResult& d) {
    return std::array<double, 8>{d.soe_0,   d.alpha,    d.f_avg,   d.soe_min,
                                 d.soe_max, d.eps_mean, d.eps_rms, d.eps_max};
  };
  std::array<double, 8> sum{};
  std::array<double, 8> mx = fields(report.days.front());
  std::array<double, 8> mn = mx;
  for (const DayResult& d : report.days) {
    const auto v = fields(d);
    for (std::size_t i = 0; i < v.size(); ++i) {
      sum[i] += v[i];
      mx[i] = std::max(mx[i], v[i]);
      mn[i] = std::min(mn[i], v[i]);
    }
  }
  const double n = static_cast<double>(report.days.size());
  auto to_row = [](const std::array<double, 8>& v) {
    return AggregateRow{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
  };
  for (double& v : sum) v /= n;
  report.mean = to_row(sum);
  report.max = to_row(mx);
  report.min = to_row(mn);
}

HorizonReport run_horizon(const std::vector<DayCase>& days, const HorizonSetup& setup,
                          const SimulationOptions& opts, const DayTraceSink& sink) {
  if (days.empty()) throw ValidationError("run_horizon: need at least one day");
  HorizonReport report;
  double soe = setup.soe_start_kwh;
  const std::int64_t day_seconds =
      static_cast<std::int64_t>(setup.grid.seconds_per_slot() * setup.grid.slots());
  for (std::size_t d = 0; d < days.size(); ++d) {
    ScheduleInputs in;
    in.bess = setup.bess;
    in.fr = setup.fr;
    in.grid = setup.grid;
    in.e_init = soe;
    in.scen = days[d].scen;
    in.env = days[d].env;

    SimulationOptions day_opts = opts;
    day_opts.epoch_start = opts.epoch_start + static_cast<std::int64_t>(d) * day_seconds;
    TraceSink day_sink;
    if (sink) day_sink = [&sink, d](const TraceRow& r) { sink(d + 1, r); };

    DayResult r = run_day(in, days[d].realized, day_opts, day_sink);
    r.day = d + 1;
    soe = r.soe_end_kwh;
    report.days.push_back(std::move(r));
  }
  compute_aggregates(report);
  return report;
}

}  // namespace bess
