#include "bess/data_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "bess/errors.hpp"

namespace bess::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Line-oriented CSV reader: "# key=value" metadata, one header, data rows.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source, std::vector<std::string> header)
      : in_(in), source_(std::move(source)), header_(std::move(header)) {
    std::string line;
    while (std::getline(in_, line)) {
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '#') {
        const std::string body = trim(std::string_view(t).substr(1));
        const std::size_t eq = body.find('=');
        if (eq != std::string::npos) {
          meta_[trim(std::string_view(body).substr(0, eq))] =
              trim(std::string_view(body).substr(eq + 1));
        }
        continue;
      }
      if (split(t) != header_) {
        std::string expected;
        for (std::size_t i = 0; i < header_.size(); ++i) expected += (i ? "," : "") + header_[i];
        throw DataError(source_, 0, "expected header '" + expected + "', got '" + t + "'");
      }
      return;
    }
    throw DataError(source_, 0, "missing header");
  }

  // Next data row, already checked for column count. False at end of input.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      const std::string t = trim(line);
      if (t.empty()) continue;
      ++row_;
      fields = split(t);
      if (fields.size() != header_.size()) {
        throw DataError(source_, row_, "expected " + std::to_string(header_.size()) +
                                           " columns, got " + std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  double number(const std::string& field, const char* column) const {
    double v = 0.0;
    const char* b = field.data();
    const char* e = field.data() + field.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
      throw DataError(source_, row_, std::string("column ") + column + ": '" + field +
                                         "' is not a number");
    }
    if (!std::isfinite(v)) {
      throw DataError(source_, row_, std::string("column ") + column + ": non-finite value");
    }
    return v;
  }

  std::int64_t integer(const std::string& field, const char* column) const {
    std::int64_t v = 0;
    const char* b = field.data();
    const char* e = field.data() + field.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) {
      throw DataError(source_, row_, std::string("column ") + column + ": '" + field +
                                         "' is not an integer");
    }
    return v;
  }

  const std::string& meta(const std::string& key) const {
    auto it = meta_.find(key);
    if (it == meta_.end()) throw DataError(source_, 0, "missing header field '" + key + "'");
    return it->second;
  }

  double meta_number(const std::string& key) const {
    const std::string& s = meta(key);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      throw DataError(source_, 0, "header field '" + key + "' is not a finite number");
    }
    return v;
  }

  bool has_meta(const std::string& key) const { return meta_.count(key) != 0; }
  std::size_t row() const { return row_; }
  const std::string& source() const { return source_; }

  void expect_slot(const std::string& field, std::size_t expected) const {
    const std::int64_t slot = integer(field, "slot");
    if (slot != static_cast<std::int64_t>(expected)) {
      throw DataError(source_, row_, "slot " + field + " out of order, expected " +
                                         std::to_string(expected));
    }
  }

 private:
  std::istream& in_;
  std::string source_;
  std::vector<std::string> header_;
  std::map<std::string, std::string> meta_;
  std::size_t row_ = 0;
};

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open file");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError(path.string() + ": cannot open for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InternalError("format_double: conversion failed");
  return std::string(buf, p);
}

LoadScenarios parse_forecast(std::istream& in, const TimeGrid& grid, const std::string& source) {
  CsvReader csv(in, source, {"slot", "l_hat_kw", "l_up_kw", "l_down_kw"});
  LoadScenarios scen;
  scen.grid = grid;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (csv.row() > grid.slots()) {
      throw DataError(source, csv.row(), "more rows than the " + std::to_string(grid.slots()) +
                                             " slots of the grid");
    }
    csv.expect_slot(f[0], csv.row() - 1);
    const double l_hat = csv.number(f[1], "l_hat_kw");
    const double l_up = csv.number(f[2], "l_up_kw");
    const double l_down = csv.number(f[3], "l_down_kw");
    if (l_down > l_up) throw DataError(source, csv.row(), "l_down_kw > l_up_kw");
    if (l_hat < l_down || l_hat > l_up) {
      throw DataError(source, csv.row(), "l_hat_kw outside [l_down_kw, l_up_kw]");
    }
    scen.forecast.push_back(l_hat);
    scen.upper.push_back(l_up);
    scen.lower.push_back(l_down);
  }
  if (scen.forecast.size() != grid.slots()) {
    throw DataError(source, 0, "expected " + std::to_string(grid.slots()) + " rows, got " +
                                   std::to_string(scen.forecast.size()));
  }
  return scen;
}

LoadScenarios load_forecast(const std::filesystem::path& path, const TimeGrid& grid) {
  auto in = open_in(path);
  return parse_forecast(in, grid, path.string());
}

void write_forecast(const std::filesystem::path& path, const LoadScenarios& scen) {
  scen.validate();
  auto out = open_out(path);
  out << "slot,l_hat_kw,l_up_kw,l_down_kw\n";
  for (std::size_t k = 0; k < scen.forecast.size(); ++k) {
    out << k << ',' << format_double(scen.forecast[k]) << ',' << format_double(scen.upper[k])
        << ',' << format_double(scen.lower[k]) << '\n';
  }
}

FrequencyRecord parse_frequency(std::istream& in, const std::string& source) {
  CsvReader csv(in, source, {"epoch_seconds", "frequency_hz"});
  FrequencyRecord rec;
  std::vector<std::string> f;
  while (csv.next(f)) {
    const std::int64_t t = csv.integer(f[0], "epoch_seconds");
    const double hz = csv.number(f[1], "frequency_hz");
    if (!rec.timestamps.empty() && t <= rec.timestamps.back()) {
      throw DataError(source, csv.row(), "timestamps must be strictly increasing");
    }
    rec.timestamps.push_back(t);
    rec.frequency.push_back(hz);
  }
  try {
    rec.validate();
  } catch (const ValidationError& e) {
    throw DataError(source, 0, e.what());
  }
  return rec;
}

FrequencyRecord load_frequency(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_frequency(in, path.string());
}

void write_frequency(const std::filesystem::path& path, const FrequencyRecord& rec) {
  auto out = open_out(path);
  out << "epoch_seconds,frequency_hz\n";
  for (std::size_t i = 0; i < rec.timestamps.size(); ++i) {
    out << rec.timestamps[i] << ',' << format_double(rec.frequency[i]) << '\n';
  }
}

std::vector<double> parse_realized_load(std::istream& in, std::size_t seconds,
                                        const std::string& source) {
  CsvReader csv(in, source, {"epoch_seconds", "load_kw"});
  std::vector<double> load;
  load.reserve(seconds);
  std::int64_t prev = 0;
  std::vector<std::string> f;
  while (csv.next(f)) {
    const std::int64_t t = csv.integer(f[0], "epoch_seconds");
    if (csv.row() > 1 && t != prev + 1) {
      throw DataError(source, csv.row(), "expected consecutive 1 s timestamps");
    }
    prev = t;
    load.push_back(csv.number(f[1], "load_kw"));
  }
  if (load.size() != seconds) {
    throw DataError(source, 0, "expected " + std::to_string(seconds) + " samples, got " +
                                   std::to_string(load.size()));
  }
  return load;
}

std::vector<double> load_realized_load(const std::filesystem::path& path, std::size_t seconds) {
  auto in = open_in(path);
  return parse_realized_load(in, seconds, path.string());
}

void write_realized_load(const std::filesystem::path& path, std::int64_t epoch_start,
                         const std::vector<double>& load_kw) {
  auto out = open_out(path);
  out << "epoch_seconds,load_kw\n";
  for (std::size_t i = 0; i < load_kw.size(); ++i) {
    out << epoch_start + static_cast<std::int64_t>(i) << ',' << format_double(load_kw[i]) << '\n';
  }
}

void write_plan(std::ostream& out, const PlanFile& pf) {
  const DayAheadPlan& p = pf.plan;
  if (p.offset.size() != p.dispatch_plan.size()) {
    throw DimensionError("write_plan: offset and dispatch plan lengths differ");
  }
  out << "# alpha_kw_per_hz=" << format_double(p.alpha) << '\n'
      << "# e_init_kwh=" << format_double(pf.e_init_kwh) << '\n'
      << "# date=" << pf.date << '\n'
      << "# fallback_used=" << (p.fallback_used ? 1 : 0) << '\n'
      << "# stage=" << to_string(p.stage) << '\n'
      << "# relaxation_kwh=" << format_double(p.relaxation_kwh) << '\n'
      << "# revenue=" << format_double(p.revenue) << '\n'
      << "slot,f_kw,p_hat_kw\n";
  for (std::size_t k = 0; k < p.offset.size(); ++k) {
    out << k << ',' << format_double(p.offset[k]) << ',' << format_double(p.dispatch_plan[k])
        << '\n';
  }
}

void write_plan(const std::filesystem::path& path, const PlanFile& plan) {
  auto out = open_out(path);
  write_plan(out, plan);
}

PlanFile parse_plan(std::istream& in, const std::string& source) {
  CsvReader csv(in, source, {"slot", "f_kw", "p_hat_kw"});
  PlanFile pf;
  pf.plan.alpha = csv.meta_number("alpha_kw_per_hz");
  if (pf.plan.alpha < 0.0) throw DataError(source, 0, "alpha_kw_per_hz must be non-negative");
  pf.e_init_kwh = csv.meta_number("e_init_kwh");
  pf.date = csv.meta("date");
  if (csv.has_meta("fallback_used")) pf.plan.fallback_used = csv.meta("fallback_used") == "1";
  if (csv.has_meta("stage")) {
    const std::string& s = csv.meta("stage");
    if (s == "none") pf.plan.stage = FallbackStage::none;
    else if (s == "alpha-zero") pf.plan.stage = FallbackStage::alpha_zero;
    else if (s == "energy-relaxed") pf.plan.stage = FallbackStage::energy_relaxed;
    else throw DataError(source, 0, "unknown stage '" + s + "'");
  }
  if (csv.has_meta("relaxation_kwh")) pf.plan.relaxation_kwh = csv.meta_number("relaxation_kwh");
  if (csv.has_meta("revenue")) pf.plan.revenue = csv.meta_number("revenue");
  std::vector<std::string> f;
  while (csv.next(f)) {
    csv.expect_slot(f[0], csv.row() - 1);
    pf.plan.offset.push_back(csv.number(f[1], "f_kw"));
    pf.plan.dispatch_plan.push_back(csv.number(f[2], "p_hat_kw"));
  }
  if (pf.plan.offset.empty()) throw DataError(source, 0, "plan has no slots");
  return pf;
}

PlanFile read_plan(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_plan(in, path.string());
}

void write_envelope(std::ostream& out, const FrequencyEnvelope& env) {
  env.validate();
  out << "# confidence_z=" << format_double(env.confidence_z) << '\n'
      << "# horizon_h=" << format_double(env.grid.horizon_h()) << '\n'
      << "slot,w_down,mean,w_up,std\n";
  for (std::size_t k = 0; k < env.mean.size(); ++k) {
    out << k << ',' << format_double(env.w_down[k]) << ',' << format_double(env.mean[k]) << ','
        << format_double(env.w_up[k]) << ',' << format_double(env.std[k]) << '\n';
  }
}

void write_envelope(const std::filesystem::path& path, const FrequencyEnvelope& env) {
  auto out = open_out(path);
  write_envelope(out, env);
}

FrequencyEnvelope parse_envelope(std::istream& in, const std::string& source) {
  CsvReader csv(in, source, {"slot", "w_down", "mean", "w_up", "std"});
  FrequencyEnvelope env;
  env.confidence_z = csv.meta_number("confidence_z");
  const double horizon = csv.meta_number("horizon_h");
  std::vector<std::string> f;
  while (csv.next(f)) {
    csv.expect_slot(f[0], csv.row() - 1);
    const double lo = csv.number(f[1], "w_down");
    const double mu = csv.number(f[2], "mean");
    const double hi = csv.number(f[3], "w_up");
    const double sd = csv.number(f[4], "std");
    if (!(lo <= mu && mu <= hi)) throw DataError(source, csv.row(), "expected w_down <= mean <= w_up");
    if (sd < 0.0) throw DataError(source, csv.row(), "std must be non-negative");
    env.w_down.push_back(lo);
    env.mean.push_back(mu);
    env.w_up.push_back(hi);
    env.std.push_back(sd);
  }
  if (env.mean.empty()) throw DataError(source, 0, "envelope has no slots");
  try {
    env.grid = TimeGrid(horizon, env.mean.size());
  } catch (const ValidationError& e) {
    throw DataError(source, 0, e.what());
  }
  return env;
}

FrequencyEnvelope read_envelope(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_envelope(in, path.string());
}

TraceWriter::TraceWriter(const std::filesystem::path& path) : out_(open_out(path)) {
  out_ << "epoch_s,slot,f_hz,feeder_kw,b_fr_kw,b_d_kw,b_total_kw,soe_kwh,eps_kw\n";
}

void TraceWriter::write(const TraceRow& r) {
  out_ << r.epoch_s << ',' << r.slot << ',' << format_double(r.f_hz) << ','
       << format_double(r.feeder_kw) << ',' << format_double(r.b_fr_kw) << ','
       << format_double(r.b_d_kw) << ',' << format_double(r.b_total_kw) << ','
       << format_double(r.soe_kwh) << ',' << format_double(r.eps_kw) << '\n';
}

void write_budget_csv(const std::filesystem::path& path, const DayResult& day) {
  auto out = open_out(path);
  out << "slot,e_lower_kwh,e_upper_kwh,e_disp_lower_kwh,e_disp_upper_kwh,soe_kwh\n";
  const auto& total = day.budget_trace;
  const auto& disp = day.dispatch_trace;
  for (std::size_t k = 0; k < total.size(); ++k) {
    const double soe = k < day.soe_slot_kwh.size() ? day.soe_slot_kwh[k] : std::nan("");
    out << k << ',' << format_double(total.lower()[k]) << ',' << format_double(total.upper()[k])
        << ',' << format_double(disp.lower()[k]) << ',' << format_double(disp.upper()[k]) << ','
        << format_double(soe) << '\n';
  }
}

namespace {

nlohmann::json to_json(const AggregateRow& r) {
  return {{"soe_0", r.soe_0},       {"alpha", r.alpha},       {"f_avg", r.f_avg},
          {"soe_min", r.soe_min},   {"soe_max", r.soe_max},   {"eps_mean", r.eps_mean},
          {"eps_rms", r.eps_rms},   {"eps_max", r.eps_max}};
}

}  // namespace

nlohmann::json to_json(const DayResult& d) {
  return {{"day", d.day},
          {"soe_0", d.soe_0},
          {"alpha", d.alpha},
          {"f_avg", d.f_avg},
          {"soe_min", d.soe_min},
          {"soe_max", d.soe_max},
          {"eps_mean", d.eps_mean},
          {"eps_rms", d.eps_rms},
          {"eps_max", d.eps_max},
          {"fallback_used", d.fallback_used},
          {"fallback_stage", to_string(d.stage)},
          {"soe_end_kwh", d.soe_end_kwh},
          {"max_excursion_kwh", d.max_excursion_kwh},
          {"clamp_events", d.clamp_events},
          {"data_quality_events", d.data_quality_events},
          {"dispatch_saturated_s", d.dispatch_saturated_s},
          {"fr_saturated_s", d.fr_saturated_s}};
}

DayResult day_from_json(const nlohmann::json& j) {
  DayResult d;
  try {
    d.day = j.at("day").get<std::size_t>();
    d.soe_0 = j.at("soe_0").get<double>();
    d.alpha = j.at("alpha").get<double>();
    d.f_avg = j.at("f_avg").get<double>();
    d.soe_min = j.at("soe_min").get<double>();
    d.soe_max = j.at("soe_max").get<double>();
    d.eps_mean = j.at("eps_mean").get<double>();
    d.eps_rms = j.at("eps_rms").get<double>();
    d.eps_max = j.at("eps_max").get<double>();
    d.fallback_used = j.at("fallback_used").get<bool>();
    const std::string stage = j.value("fallback_stage", std::string("none"));
    d.stage = stage == "alpha-zero"       ? FallbackStage::alpha_zero
              : stage == "energy-relaxed" ? FallbackStage::energy_relaxed
                                          : FallbackStage::none;
    d.soe_end_kwh = j.value("soe_end_kwh", 0.0);
    d.max_excursion_kwh = j.value("max_excursion_kwh", 0.0);
    d.clamp_events = j.value("clamp_events", std::size_t{0});
    d.data_quality_events = j.value("data_quality_events", std::size_t{0});
    d.dispatch_saturated_s = j.value("dispatch_saturated_s", std::size_t{0});
    d.fr_saturated_s = j.value("fr_saturated_s", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw DataError("report", 0, std::string("malformed day entry: ") + e.what());
  }
  return d;
}

nlohmann::json to_json(const HorizonReport& report) {
  nlohmann::json days = nlohmann::json::array();
  for (const DayResult& d : report.days) days.push_back(to_json(d));
  return {{"days", days},
          {"aggregate", {{"mean", to_json(report.mean)},
                         {"max", to_json(report.max)},
                         {"min", to_json(report.min)}}},
          {"fallback_days", report.fallback_days()}};
}

HorizonReport report_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("days") || !j.at("days").is_array()) {
    throw DataError("report", 0, "expected an object with a 'days' array");
  }
  HorizonReport r;
  for (const auto& d : j.at("days")) r.days.push_back(day_from_json(d));
  if (r.days.empty()) throw DataError("report", 0, "report has no days");
  compute_aggregates(r);
  return r;
}

void write_report(const std::filesystem::path& path, const HorizonReport& report) {
  auto out = open_out(path);
  out << to_json(report).dump(2) << '\n';
}

HorizonReport read_report(const std::filesystem::path& path) {
  auto in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string(), 0, std::string("invalid JSON: ") + e.what());
  }
  return report_from_json(j);
}

}  // namespace bess::io
