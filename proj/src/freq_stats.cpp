#include "bess/freq_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "bess/errors.hpp"

namespace bess {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::size_t window_seconds(const TimeGrid& grid) {
  return grid.seconds_per_slot() * grid.slots();
}

}  // namespace

void FrequencyRecord::validate(const FrequencyLimits& limits) const {
  if (timestamps.size() != frequency.size()) {
    throw DimensionError("FrequencyRecord: timestamp and frequency counts differ");
  }
  for (std::size_t i = 0; i < frequency.size(); ++i) {
    if (i > 0 && timestamps[i] <= timestamps[i - 1]) {
      throw ValidationError("FrequencyRecord: timestamps not strictly increasing at sample " +
                            std::to_string(i));
    }
    const double f = frequency[i];
    if (!std::isfinite(f) || f < limits.f_low || f > limits.f_high) {
      throw ValidationError("FrequencyRecord: frequency " + std::to_string(f) +
                            " Hz out of range at sample " + std::to_string(i));
    }
  }
}

void FrequencyEnvelope::validate() const {
  const std::size_t n = grid.slots();
  if (w_up.size() != n || w_down.size() != n || mean.size() != n || std.size() != n) {
    throw DimensionError("FrequencyEnvelope: all profiles must have " + std::to_string(n) +
                         " slots");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(w_down[k] <= mean[k] && mean[k] <= w_up[k]) || !(std[k] >= 0.0)) {
      throw ValidationError("FrequencyEnvelope: expected w_down <= mean <= w_up and std >= 0 at slot " +
                            std::to_string(k));
    }
  }
}

std::vector<double> compute_wf(std::span<const double> frequency_1hz, const FrParams& fr,
                               const TimeGrid& grid) {
  fr.validate();
  const std::size_t sps = grid.seconds_per_slot();
  if (frequency_1hz.size() != sps * grid.slots()) {
    throw DimensionError("compute_wf: expected " + std::to_string(sps * grid.slots()) +
                         " one-second samples, got " + std::to_string(frequency_1hz.size()));
  }
  std::vector<double> wf(grid.slots());
  double acc = 0.0;
  std::size_t i = 0;
  for (std::size_t k = 0; k < grid.slots(); ++k) {
    for (std::size_t s = 0; s < sps; ++s, ++i) acc += (frequency_1hz[i] - fr.f_nominal) / 3600.0;
    wf[k] = acc;
  }
  return wf;
}

std::vector<double> compute_wf(const FrequencyRecord& day, const FrParams& fr,
                               const TimeGrid& grid, const WfOptions& opts) {
  day.validate(opts.limits);
  if (day.timestamps.empty()) throw ValidationError("compute_wf: empty frequency record");

  const std::int64_t start =
      opts.window_start.value_or(floor_div(day.timestamps.front(), kSecondsPerDay) * kSecondsPerDay);
  const std::size_t total = window_seconds(grid);
  std::vector<double> series(total);

  const auto& ts = day.timestamps;
  const auto& f = day.frequency;
  // index of the first sample with timestamp >= t
  std::size_t next = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), start) - ts.begin());
  for (std::size_t s = 0; s < total; ++s) {
    const std::int64_t t = start + static_cast<std::int64_t>(s);
    while (next < ts.size() && ts[next] < t) ++next;
    if (next < ts.size() && ts[next] == t) {
      series[s] = f[next];
      continue;
    }
    const bool has_prev = next > 0;
    const bool has_next = next < ts.size();
    if (has_prev && has_next) {
      const std::int64_t t0 = ts[next - 1];
      const std::int64_t t1 = ts[next];
      if (t1 - t0 - 1 > opts.max_gap_s) {
        throw ValidationError("compute_wf: gap of " + std::to_string(t1 - t0 - 1) +
                              " s starting at epoch " + std::to_string(t0 + 1) +
                              " exceeds the interpolation limit");
      }
      const double w = static_cast<double>(t - t0) / static_cast<double>(t1 - t0);
      series[s] = f[next - 1] + w * (f[next] - f[next - 1]);
    } else if (has_next && ts[next] - t <= opts.max_gap_s) {
      series[s] = f[next];
    } else if (has_prev && t - ts[next - 1] <= opts.max_gap_s) {
      series[s] = f[next - 1];
    } else {
      throw ValidationError("compute_wf: record does not cover the window at epoch " +
                            std::to_string(t));
    }
  }
  return compute_wf(series, fr, grid);
}

std::vector<FrequencyRecord> split_utc_days(const FrequencyRecord& record) {
  std::map<std::int64_t, FrequencyRecord> by_day;
  for (std::size_t i = 0; i < record.timestamps.size(); ++i) {
    FrequencyRecord& d = by_day[floor_div(record.timestamps[i], kSecondsPerDay)];
    d.timestamps.push_back(record.timestamps[i]);
    d.frequency.push_back(record.frequency[i]);
  }
  std::vector<FrequencyRecord> out;
  out.reserve(by_day.size());
  for (auto& [day, rec] : by_day) out.push_back(std::move(rec));
  return out;
}

FrequencyEnvelope fit_envelope(std::span<const std::vector<double>> days, double confidence_z,
                               const TimeGrid& grid) {
  if (days.size() < 2) {
    throw ValidationError("fit_envelope: need at least 2 daily trajectories, got " +
                          std::to_string(days.size()));
  }
  if (!(confidence_z >= 0.0) || !std::isfinite(confidence_z)) {
    throw ValidationError("fit_envelope: confidence_z must be finite and non-negative");
  }
  const std::size_t n = grid.slots();
  for (const auto& d : days) {
    if (d.size() != n) throw DimensionError("fit_envelope: trajectory length differs from grid");
  }

  FrequencyEnvelope env;
  env.grid = grid;
  env.confidence_z = confidence_z;
  env.mean.resize(n);
  env.std.resize(n);
  env.w_up.resize(n);
  env.w_down.resize(n);

  const double count = static_cast<double>(days.size());
  std::vector<double> column(days.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t d = 0; d < days.size(); ++d) column[d] = days[d][k];
    // sorted accumulation makes the result independent of day order
    std::sort(column.begin(), column.end());
    // accumulate relative to the first sample so identical days give an exact mean
    const double ref = column.front();
    double sum = 0.0;
    for (double v : column) sum += v - ref;
    const double mu = ref + sum / count;
    std::vector<double> sq(column.size());
    for (std::size_t d = 0; d < column.size(); ++d) sq[d] = (column[d] - mu) * (column[d] - mu);
    std::sort(sq.begin(), sq.end());
    double ss = 0.0;
    for (double v : sq) ss += v;
    const double sigma = std::sqrt(ss / (count - 1.0));
    const double half = confidence_z * sigma;
    env.mean[k] = mu;
    env.std[k] = sigma;
    env.w_up[k] = mu + half;
    env.w_down[k] = mu - half;
  }
  return env;
}

NormalityResult normality_diagnostic(std::span<const double> samples, std::size_t bins) {
  const std::size_t n = samples.size();
  if (n < 30) {
    throw ValidationError("normality_diagnostic: need at least 30 samples, got " +
                          std::to_string(n));
  }
  if (bins == 0) bins = std::max<std::size_t>(5, n / 50);
  if (bins < 5) throw ValidationError("normality_diagnostic: need at least 5 bins");

  NormalityResult res;
  res.bins = bins;
  res.dof = bins - 3;
  res.critical_value =
      boost::math::quantile(boost::math::chi_squared(static_cast<double>(res.dof)), 0.95);

  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mu = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mu) * (v - mu);
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    res.statistic = std::numeric_limits<double>::infinity();
    res.reject = true;
    return res;
  }

  const boost::math::normal dist(mu, sigma);
  std::vector<double> edges(bins - 1);
  for (std::size_t b = 1; b < bins; ++b) {
    edges[b - 1] = boost::math::quantile(dist, static_cast<double>(b) / static_cast<double>(bins));
  }
  std::vector<std::size_t> counts(bins, 0);
  for (double v : samples) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    ++counts[static_cast<std::size_t>(it - edges.begin())];
  }
  const double expected = static_cast<double>(n) / static_cast<double>(bins);
  double chi2 = 0.0;
  for (std::size_t c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  res.statistic = chi2;
  res.reject = chi2 > res.critical_value;
  return res;
}

}  // namespace bess
