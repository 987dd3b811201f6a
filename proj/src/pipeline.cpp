#include "bess/pipeline.hpp"

namespace bess {

namespace {

constexpr std::uint64_t kHistoryStream = 0x48495354ULL;

}  // namespace

FrequencyEnvelope synthetic_envelope(const Config& cfg) {
  const auto history = synthetic_wf_history(derive_seed(cfg.seed, kHistoryStream), cfg.history_days,
                                            cfg.synthetic, cfg.fr, cfg.grid);
  return fit_envelope(history, cfg.confidence_z, cfg.grid);
}

DayCase synthetic_day_case(const Config& cfg, const FrequencyEnvelope& env, std::size_t day_index) {
  SyntheticDay day = scenario_generator(cfg.seed, day_index, cfg.synthetic, cfg.grid, cfg.fr, &env);
  DayCase c;
  c.scen = std::move(day.scen);
  c.env = env;
  c.realized.load_kw = std::move(day.load_1hz);
  c.realized.freq_hz = std::move(day.freq_1hz);
  return c;
}

SimulationOptions simulation_options(const Config& cfg) {
  SimulationOptions o;
  o.mode = cfg.mode;
  o.revenue = cfg.revenue;
  o.solver = cfg.solver;
  o.perfect_forecast = cfg.perfect_forecast;
  o.persistence_window_s = cfg.persistence_window_s;
  o.epoch_start = cfg.epoch_start;
  return o;
}

HorizonSetup horizon_setup(const Config& cfg) {
  HorizonSetup s;
  s.bess = cfg.bess;
  s.fr = cfg.fr;
  s.grid = cfg.grid;
  s.soe_start_kwh = cfg.e_init_kwh;
  return s;
}

HorizonReport simulate_synthetic(const Config& cfg, const DayTraceSink& sink) {
  cfg.validate();
  const FrequencyEnvelope env = synthetic_envelope(cfg);
  std::vector<DayCase> days;
  days.reserve(cfg.days);
  for (std::size_t d = 0; d < cfg.days; ++d) days.push_back(synthetic_day_case(cfg, env, d));
  return run_horizon(days, horizon_setup(cfg), simulation_options(cfg), sink);
}

}  // namespace bess
