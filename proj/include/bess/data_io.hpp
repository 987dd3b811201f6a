#pragma once

// CSV and JSON file formats.
//
//   forecast:     slot,l_hat_kw,l_up_kw,l_down_kw           (one row per slot)
//   frequency:    epoch_seconds,frequency_hz
//   realization:  epoch_seconds,load_kw
//   plan:         "# key=value" header lines, then slot,f_kw,p_hat_kw
//   envelope:     "# key=value" header lines, then slot,w_down,mean,w_up,std
//   trace:        epoch_s,slot,f_hz,feeder_kw,b_fr_kw,b_d_kw,b_total_kw,soe_kwh,eps_kw
//   budget:       slot,e_lower_kwh,e_upper_kwh,e_disp_lower_kwh,e_disp_upper_kwh,soe_kwh
//
// Slots are numbered from 0. Readers report problems as DataError with the
// 1-based data row (header and comment lines are not counted).

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "bess/budgets.hpp"
#include "bess/freq_stats.hpp"
#include "bess/scheduler.hpp"
#include "bess/simulator.hpp"

namespace bess::io {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

LoadScenarios parse_forecast(std::istream& in, const TimeGrid& grid,
                             const std::string& source = "forecast");
LoadScenarios load_forecast(const std::filesystem::path& path, const TimeGrid& grid);
void write_forecast(const std::filesystem::path& path, const LoadScenarios& scen);

FrequencyRecord parse_frequency(std::istream& in, const std::string& source = "frequency");
FrequencyRecord load_frequency(const std::filesystem::path& path);
void write_frequency(const std::filesystem::path& path, const FrequencyRecord& rec);

/// 1 Hz prosumption samples; must be gap-free and exactly `seconds` long.
std::vector<double> parse_realized_load(std::istream& in, std::size_t seconds,
                                        const std::string& source = "load");
std::vector<double> load_realized_load(const std::filesystem::path& path, std::size_t seconds);
void write_realized_load(const std::filesystem::path& path, std::int64_t epoch_start,
                         const std::vector<double>& load_kw);

struct PlanFile {
  DayAheadPlan plan;
  double e_init_kwh = 0.0;
  std::string date;
};

void write_plan(std::ostream& out, const PlanFile& plan);
void write_plan(const std::filesystem::path& path, const PlanFile& plan);
PlanFile parse_plan(std::istream& in, const std::string& source = "plan");
PlanFile read_plan(const std::filesystem::path& path);

void write_envelope(std::ostream& out, const FrequencyEnvelope& env);
void write_envelope(const std::filesystem::path& path, const FrequencyEnvelope& env);
FrequencyEnvelope parse_envelope(std::istream& in, const std::string& source = "envelope");
FrequencyEnvelope read_envelope(const std::filesystem::path& path);

class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& path);
  void write(const TraceRow& row);

 private:
  std::ofstream out_;
};

void write_budget_csv(const std::filesystem::path& path, const DayResult& day);

nlohmann::json to_json(const DayResult& day);
DayResult day_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HorizonReport& report);
HorizonReport report_from_json(const nlohmann::json& j);
void write_report(const std::filesystem::path& path, const HorizonReport& report);
HorizonReport read_report(const std::filesystem::path& path);

}  // namespace bess::io
