#include "bess/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bess/errors.hpp"

namespace bess {

namespace {

double office_shape(double hour) {
  const double rise = 1.0 / (1.0 + std::exp(-2.0 * (hour - 7.5)));
  const double fall = 1.0 / (1.0 + std::exp(2.0 * (hour - 18.5)));
  return rise * fall;
}

double solar_shape(double hour) {
  if (hour <= 6.0 || hour >= 19.0) return 0.0;
  const double s = std::sin(std::numbers::pi * (hour - 6.0) / 13.0);
  return s * s;
}

bool inside(const std::vector<double>& wf, const FrequencyEnvelope& env) {
  for (std::size_t k = 0; k < wf.size(); ++k) {
    if (wf[k] < env.w_down[k] || wf[k] > env.w_up[k]) return false;
  }
  return true;
}

}  // namespace

void SyntheticParams::validate(const FrParams& fr) const {
  const double values[] = {base_kw, office_peak_kw, pv_kwp, band_kw, band_frac, band_pv_frac,
                           band_day_spread, slot_noise, intra_noise_kw, ou_tau_s, ou_sigma_hz,
                           stress_factor};
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("SyntheticParams: parameters must be finite and non-negative");
    }
  }
  if (!(ou_tau_s > 0.0)) throw ValidationError("SyntheticParams: ou_tau_s must be positive");
  if (band_kw <= 0.0 && band_frac <= 0.0 && band_pv_frac <= 0.0 && slot_noise > 0.0) {
    throw ValidationError("SyntheticParams: realized deviations requested with a zero-width band");
  }
  if (ou_sigma_hz * 6.0 > fr.delta_f_max) {
    throw ValidationError("SyntheticParams: ou_sigma_hz too large for the PFR activation range");
  }
}

FrequencyRecord SyntheticDay::frequency_record(std::int64_t epoch_start) const {
  FrequencyRecord rec;
  rec.timestamps.resize(freq_1hz.size());
  for (std::size_t i = 0; i < freq_1hz.size(); ++i) {
    rec.timestamps[i] = epoch_start + static_cast<std::int64_t>(i);
  }
  rec.frequency = freq_1hz;
  return rec;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> synthetic_frequency(std::uint64_t seed, const SyntheticParams& params,
                                        const FrParams& fr, std::size_t seconds) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double a = std::exp(-1.0 / params.ou_tau_s);
  const double innov = params.ou_sigma_hz * std::sqrt(1.0 - a * a);
  const double cap = 0.95 * fr.delta_f_max;
  std::vector<double> f(seconds);
  double dev = params.ou_sigma_hz * gauss(rng);
  for (std::size_t i = 0; i < seconds; ++i) {
    f[i] = fr.f_nominal + std::clamp(dev, -cap, cap);
    dev = a * dev + innov * gauss(rng);
  }
  return f;
}

std::vector<std::vector<double>> synthetic_wf_history(std::uint64_t seed, std::size_t days,
                                                      const SyntheticParams& params,
                                                      const FrParams& fr, const TimeGrid& grid) {
  params.validate(fr);
  const std::size_t seconds = grid.seconds_per_slot() * grid.slots();
  std::vector<std::vector<double>> out;
  out.reserve(days);
  for (std::size_t d = 0; d < days; ++d) {
    const auto f = synthetic_frequency(derive_seed(seed, d), params, fr, seconds);
    out.push_back(compute_wf(f, fr, grid));
  }
  return out;
}

SyntheticDay scenario_generator(std::uint64_t seed, std::size_t day_index,
                                const SyntheticParams& params, const TimeGrid& grid,
                                const FrParams& fr, const FrequencyEnvelope* frequency_envelope) {
  params.validate(fr);
  if (frequency_envelope && !(frequency_envelope->grid == grid)) {
    throw DimensionError("scenario_generator: envelope grid differs from the day grid");
  }
  const std::size_t n = grid.slots();
  const std::size_t sps = grid.seconds_per_slot();
  const double hours_per_slot = grid.dt();

  std::mt19937_64 rng(derive_seed(seed, 2 * day_index));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double office_level = 0.85 + 0.3 * unit(rng);
  const double clear_sky = 0.3 + 0.7 * unit(rng);
  const double spread = params.band_day_spread;
  const double band_scale = std::exp(spread * gauss(rng) - 0.5 * spread * spread);
  const double skew = 0.6 * unit(rng) - 0.3;

  SyntheticDay day;
  day.scen.grid = grid;
  day.scen.forecast.resize(n);
  day.scen.upper.resize(n);
  day.scen.lower.resize(n);
  std::vector<double> slot_mean(n);

  const double phi = 0.85;
  double z = gauss(rng);
  for (std::size_t k = 0; k < n; ++k) {
    const double hour = (static_cast<double>(k) + 0.5) * hours_per_slot;
    const double pv = params.pv_kwp * clear_sky * solar_shape(hour);
    const double l_hat = params.base_kw + params.office_peak_kw * office_level * office_shape(hour) - pv;
    const double half = (params.band_kw + params.band_frac * std::abs(l_hat) + params.band_pv_frac * pv) *
                        band_scale;
    const double up = half * (1.0 + skew);
    const double down = half * (1.0 - skew);
    day.scen.forecast[k] = l_hat;
    day.scen.upper[k] = l_hat + up;
    day.scen.lower[k] = l_hat - down;

    double dev = params.slot_noise * z * (z >= 0.0 ? up : down);
    if (params.contained) {
      dev = std::clamp(dev, -0.999 * down, 0.999 * up);
    } else {
      dev *= params.stress_factor;
    }
    slot_mean[k] = l_hat + dev;
    z = phi * z + std::sqrt(1.0 - phi * phi) * gauss(rng);
  }

  // zero-mean second-to-second ripple inside each slot
  day.load_1hz.resize(n * sps);
  std::vector<double> ripple(sps);
  double e = 0.0;
  const double psi = 0.9;
  for (std::size_t k = 0; k < n; ++k) {
    double mean = 0.0;
    for (std::size_t s = 0; s < sps; ++s) {
      e = psi * e + std::sqrt(1.0 - psi * psi) * params.intra_noise_kw * gauss(rng);
      ripple[s] = e;
      mean += e;
    }
    mean /= static_cast<double>(sps);
    for (std::size_t s = 0; s < sps; ++s) day.load_1hz[k * sps + s] = slot_mean[k] + (ripple[s] - mean);
  }

  const std::size_t seconds = n * sps;
  const std::uint64_t fseed = derive_seed(seed, 2 * day_index + 1);
  day.freq_1hz = synthetic_frequency(fseed, params, fr, seconds);
  if (params.contained && frequency_envelope) {
    constexpr std::uint64_t kRedraws = 64;
    bool ok = inside(compute_wf(day.freq_1hz, fr, grid), *frequency_envelope);
    for (std::uint64_t r = 1; r <= kRedraws && !ok; ++r) {
      day.freq_1hz = synthetic_frequency(derive_seed(fseed, r), params, fr, seconds);
      ok = inside(compute_wf(day.freq_1hz, fr, grid), *frequency_envelope);
    }
    // shrink the deviation toward zero until the trajectory fits
    std::vector<double> base = day.freq_1hz;
    for (double c = 0.5; !ok; c *= 0.5) {
      if (c < 1e-6) {
        throw ValidationError("scenario_generator: frequency envelope does not contain zero deviation");
      }
      for (std::size_t i = 0; i < seconds; ++i) {
        day.freq_1hz[i] = fr.f_nominal + c * (base[i] - fr.f_nominal);
      }
      ok = inside(compute_wf(day.freq_1hz, fr, grid), *frequency_envelope);
    }
  }
  return day;
}

}  // namespace bess
