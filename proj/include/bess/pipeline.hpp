#pragma once

// Glue for the synthetic runs shared by the command line and the tests.

#include <cstdint>
#include <vector>

#include "bess/config.hpp"
#include "bess/freq_stats.hpp"
#include "bess/scenario.hpp"
#include "bess/simulator.hpp"

namespace bess {

/// Envelope fitted on `cfg.history_days` synthetic frequency days drawn from
/// a seed stream disjoint from the simulated days.
FrequencyEnvelope synthetic_envelope(const Config& cfg);

/// Synthetic day `day_index` (0-based) of the configured horizon.
DayCase synthetic_day_case(const Config& cfg, const FrequencyEnvelope& env, std::size_t day_index);

/// Schedules and simulates `cfg.days` synthetic days with chained SOE.
HorizonReport simulate_synthetic(const Config& cfg, const DayTraceSink& sink = {});

SimulationOptions simulation_options(const Config& cfg);
HorizonSetup horizon_setup(const Config& cfg);

}  // namespace bess
