#pragma once

// Seeded synthetic days standing in for measured feeder and grid-frequency
// archives. Load: office-style demand minus rooftop PV with a day-ahead
// band around the forecast. Frequency: Ornstein-Uhlenbeck deviation around
// the nominal value at 1 s resolution.

#include <cstdint>
#include <vector>

#include "bess/budgets.hpp"
#include "bess/freq_stats.hpp"

namespace bess {

struct SyntheticParams {
  double base_kw = 150.0;         // night-time prosumption
  double office_peak_kw = 150.0;  // added daytime office demand
  double pv_kwp = 90.0;
  double band_kw = 4.0;           // fixed part of the band half-width
  double band_frac = 0.015;       // part proportional to the forecast
  double band_pv_frac = 0.12;     // part proportional to expected PV output
  double band_day_spread = 0.25;  // lognormal day-to-day spread of the band
  double slot_noise = 0.5;        // realized slot deviation, fraction of half-width
  double intra_noise_kw = 4.0;    // second-to-second noise within a slot
  double ou_tau_s = 1800.0;       // frequency deviation correlation time
  double ou_sigma_hz = 0.02;      // stationary deviation std
  bool contained = true;          // realizations kept inside the bands
  double stress_factor = 1.5;     // deviation scale when not contained

  void validate(const FrParams& fr) const;
};

struct SyntheticDay {
  LoadScenarios scen;
  std::vector<double> load_1hz;  // kW
  std::vector<double> freq_1hz;  // Hz

  FrequencyRecord frequency_record(std::int64_t epoch_start) const;
};

/// Mixes (seed, stream) into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// OU frequency series for one window of `seconds` samples.
std::vector<double> synthetic_frequency(std::uint64_t seed, const SyntheticParams& params,
                                        const FrParams& fr, std::size_t seconds);

/// W_f trajectories of `days` independent synthetic frequency days.
std::vector<std::vector<double>> synthetic_wf_history(std::uint64_t seed, std::size_t days,
                                                      const SyntheticParams& params,
                                                      const FrParams& fr, const TimeGrid& grid);

/// One synthetic day. With `params.contained`, realized slot-average load
/// lies inside [lower, upper] and, when `frequency_envelope` is given, the
/// realized W_f lies inside [w_down, w_up] at every slot.
SyntheticDay scenario_generator(std::uint64_t seed, std::size_t day_index,
                                const SyntheticParams& params, const TimeGrid& grid,
                                const FrParams& fr,
                                const FrequencyEnvelope* frequency_envelope = nullptr);

}  // namespace bess
