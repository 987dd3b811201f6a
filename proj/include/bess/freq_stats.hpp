#pragma once

// Frequency-deviation energy content and its per-slot confidence envelope.
//
// W_f is expressed in Hz*h so that alpha [kW/Hz] * W_f gives kWh directly.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bess/budgets.hpp"

namespace bess {

/// Plausibility range for measured grid frequency, Hz.
struct FrequencyLimits {
  double f_low = 45.0;
  double f_high = 55.0;
};

/// 1 s frequency samples, timestamps in UTC epoch seconds.
struct FrequencyRecord {
  std::vector<std::int64_t> timestamps;
  std::vector<double> frequency;

  /// Strictly increasing timestamps, equal lengths, values within limits.
  void validate(const FrequencyLimits& limits = FrequencyLimits{}) const;
};

struct FrequencyEnvelope {
  std::vector<double> w_up;
  std::vector<double> w_down;
  std::vector<double> mean;
  std::vector<double> std;
  double confidence_z = 1.96;
  TimeGrid grid;

  void validate() const;
};

struct WfOptions {
  /// Gaps up to this many seconds are linearly interpolated.
  std::int64_t max_gap_s = 60;
  FrequencyLimits limits{};
  /// Start of the integration window. Defaults to the UTC midnight at or
  /// before the first sample.
  std::optional<std::int64_t> window_start;
};

/// Running integral of (f - f_n) in Hz*h, sampled at the end of each slot.
std::vector<double> compute_wf(const FrequencyRecord& day, const FrParams& fr,
                               const TimeGrid& grid, const WfOptions& opts = {});

/// Same integral from a gap-free 1 Hz series starting at the window start.
std::vector<double> compute_wf(std::span<const double> frequency_1hz, const FrParams& fr,
                               const TimeGrid& grid);

/// Splits a multi-day record on UTC day boundaries, in chronological order.
std::vector<FrequencyRecord> split_utc_days(const FrequencyRecord& record);

/// Per-slot sample mean and (n-1) standard deviation over the given days;
/// w_up/w_down = mean +- z*std.
FrequencyEnvelope fit_envelope(std::span<const std::vector<double>> days,
                               double confidence_z, const TimeGrid& grid);

struct NormalityResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  std::size_t bins = 0;
  std::size_t dof = 0;
  bool reject = false;
};

/// Pearson chi-square goodness-of-fit against the fitted normal at the 5%
/// level, with equal-probability bins. `bins == 0` selects max(5, n/50).
NormalityResult normality_diagnostic(std::span<const double> samples, std::size_t bins = 0);

}  // namespace bess
