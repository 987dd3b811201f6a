#include "bess/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <utility>

#include "bess/data_io.hpp"
#include "bess/errors.hpp"

namespace bess {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw ValidationError("config: " + key + " = '" + v + "' is not a finite number");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ValidationError("config: " + key + " = '" + v + "' is not a valid integer");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError("config: " + key + " = '" + v + "' is not a boolean");
}

lp::PivotRule to_rule(const std::string& v) {
  if (v == "bland") return lp::PivotRule::bland;
  if (v == "dantzig") return lp::PivotRule::dantzig_bland_fallback;
  throw ValidationError("config: pivot_rule must be 'bland' or 'dantzig', got '" + v + "'");
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

Setter dbl(double Config::*field) {
  return [field](Config& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
}

template <typename Obj>
Setter dbl(Obj Config::*obj, double Obj::*field) {
  return [obj, field](Config& c, const std::string& k, const std::string& v) {
    (c.*obj).*field = to_double(k, v);
  };
}

// Keys applied in this order; grid and capacity come before anything derived.
const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"e_nom_kwh", dbl(&Config::bess, &BessParams::e_nom)},
      {"p_max_kw", dbl(&Config::bess, &BessParams::p_max)},
      {"beta", dbl(&Config::bess, &BessParams::beta)},
      {"e_min_kwh", dbl(&Config::bess, &BessParams::e_min)},
      {"e_min_frac",
       [](Config& c, const std::string& k, const std::string& v) {
         c.bess.e_min = to_double(k, v) * c.bess.e_nom;
       }},
      {"e_max_kwh", dbl(&Config::bess, &BessParams::e_max)},
      {"e_max_frac",
       [](Config& c, const std::string& k, const std::string& v) {
         c.bess.e_max = to_double(k, v) * c.bess.e_nom;
       }},
      {"horizon_h",
       [](Config& c, const std::string& k, const std::string& v) {
         c.grid = TimeGrid(to_double(k, v), c.grid.slots());
       }},
      {"slots",
       [](Config& c, const std::string& k, const std::string& v) {
         c.grid = TimeGrid(c.grid.horizon_h(), to_int<std::size_t>(k, v));
       }},
      {"f_nominal_hz", dbl(&Config::fr, &FrParams::f_nominal)},
      {"delta_f_max_hz", dbl(&Config::fr, &FrParams::delta_f_max)},
      {"mode",
       [](Config& c, const std::string&, const std::string& v) { c.mode = parse_objective_mode(v); }},
      {"price_fr", dbl(&Config::revenue, &RevenueModel::price_fr)},
      {"price_dispatch", dbl(&Config::revenue, &RevenueModel::price_dispatch)},
      {"pivot_rule",
       [](Config& c, const std::string&, const std::string& v) { c.solver.rule = to_rule(v); }},
      {"pivot_tol", dbl(&Config::solver, &lp::SolverOptions::pivot_tol)},
      {"feasibility_tol", dbl(&Config::solver, &lp::SolverOptions::feasibility_tol)},
      {"optimality_tol", dbl(&Config::solver, &lp::SolverOptions::optimality_tol)},
      {"equilibrate",
       [](Config& c, const std::string& k, const std::string& v) { c.solver.equilibrate = to_bool(k, v); }},
      {"max_iterations",
       [](Config& c, const std::string& k, const std::string& v) {
         c.solver.max_iterations = to_int<std::size_t>(k, v);
       }},
      {"seed",
       [](Config& c, const std::string& k, const std::string& v) { c.seed = to_int<std::uint64_t>(k, v); }},
      {"days",
       [](Config& c, const std::string& k, const std::string& v) { c.days = to_int<std::size_t>(k, v); }},
      {"history_days",
       [](Config& c, const std::string& k, const std::string& v) {
         c.history_days = to_int<std::size_t>(k, v);
       }},
      {"confidence_z", dbl(&Config::confidence_z)},
      {"e_init_kwh", dbl(&Config::e_init_kwh)},
      {"perfect_forecast",
       [](Config& c, const std::string& k, const std::string& v) { c.perfect_forecast = to_bool(k, v); }},
      {"persistence_window_s",
       [](Config& c, const std::string& k, const std::string& v) {
         c.persistence_window_s = to_int<std::size_t>(k, v);
       }},
      {"epoch_start",
       [](Config& c, const std::string& k, const std::string& v) {
         c.epoch_start = to_int<std::int64_t>(k, v);
       }},
      {"synthetic.base_kw", dbl(&Config::synthetic, &SyntheticParams::base_kw)},
      {"synthetic.office_peak_kw", dbl(&Config::synthetic, &SyntheticParams::office_peak_kw)},
      {"synthetic.pv_kwp", dbl(&Config::synthetic, &SyntheticParams::pv_kwp)},
      {"synthetic.band_kw", dbl(&Config::synthetic, &SyntheticParams::band_kw)},
      {"synthetic.band_frac", dbl(&Config::synthetic, &SyntheticParams::band_frac)},
      {"synthetic.band_pv_frac", dbl(&Config::synthetic, &SyntheticParams::band_pv_frac)},
      {"synthetic.band_day_spread", dbl(&Config::synthetic, &SyntheticParams::band_day_spread)},
      {"synthetic.slot_noise", dbl(&Config::synthetic, &SyntheticParams::slot_noise)},
      {"synthetic.intra_noise_kw", dbl(&Config::synthetic, &SyntheticParams::intra_noise_kw)},
      {"synthetic.ou_tau_s", dbl(&Config::synthetic, &SyntheticParams::ou_tau_s)},
      {"synthetic.ou_sigma_hz", dbl(&Config::synthetic, &SyntheticParams::ou_sigma_hz)},
      {"synthetic.contained",
       [](Config& c, const std::string& k, const std::string& v) {
         c.synthetic.contained = to_bool(k, v);
       }},
      {"synthetic.stress_factor", dbl(&Config::synthetic, &SyntheticParams::stress_factor)},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

void Config::validate() const {
  bess.validate();
  fr.validate();
  revenue.validate();
  synthetic.validate(fr);
  if (!(confidence_z > 0.0)) throw ValidationError("config: confidence_z must be positive");
  (void)grid.seconds_per_slot();
  if (days == 0) throw ValidationError("config: days must be at least 1");
  if (history_days < 2) throw ValidationError("config: history_days must be at least 2");
  if (persistence_window_s == 0) throw ValidationError("config: persistence_window_s must be positive");
  if (e_init_kwh < 0.0 || e_init_kwh > bess.e_nom) {
    throw ValidationError("config: e_init_kwh must lie in [0, e_nom_kwh]");
  }
  if (!(solver.pivot_tol > 0.0 && solver.feasibility_tol > 0.0 && solver.optimality_tol > 0.0)) {
    throw ValidationError("config: solver tolerances must be positive");
  }
  if (solver.max_iterations == 0) throw ValidationError("config: max_iterations must be positive");
}

Settings parse_settings(std::istream& in, const std::string& source) {
  Settings out;
  std::string line;
  std::size_t lineno = 0;
  const auto& keys = config_keys();
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string t = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw DataError(source, lineno, "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw DataError(source, lineno, "unknown key '" + key + "'");
    }
    if (value.empty()) throw DataError(source, lineno, "empty value for '" + key + "'");
    if (out.count(key)) throw DataError(source, lineno, "duplicate key '" + key + "'");
    out[key] = value;
  }
  return out;
}

Settings load_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open file");
  return parse_settings(in, path.string());
}

Config make_config(const Settings& settings) {
  const auto& keys = config_keys();
  for (const auto& [k, _] : settings) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ValidationError("config: unknown key '" + k + "'");
    }
  }
  if (settings.count("e_min_kwh") && settings.count("e_min_frac")) {
    throw ValidationError("config: give e_min_kwh or e_min_frac, not both");
  }
  if (settings.count("e_max_kwh") && settings.count("e_max_frac")) {
    throw ValidationError("config: give e_max_kwh or e_max_frac, not both");
  }
  Config c;
  // capacity-relative defaults track e_nom_kwh
  std::optional<double> e_min_frac = 0.05;
  std::optional<double> e_max_frac = 1.0;
  if (settings.count("e_min_kwh")) e_min_frac.reset();
  if (settings.count("e_max_kwh")) e_max_frac.reset();
  for (const auto& [key, set] : setters()) {
    auto it = settings.find(key);
    if (it != settings.end()) set(c, key, it->second);
    if (key == "e_min_frac" && it == settings.end() && e_min_frac) c.bess.e_min = *e_min_frac * c.bess.e_nom;
    if (key == "e_max_frac" && it == settings.end() && e_max_frac) c.bess.e_max = *e_max_frac * c.bess.e_nom;
  }
  if (!settings.count("e_init_kwh")) c.e_init_kwh = 0.5 * c.bess.e_nom;
  c.validate();
  return c;
}

std::string dump_config(const Config& c) {
  using io::format_double;
  std::ostringstream out;
  auto put = [&out](const std::string& k, const std::string& v) { out << k << " = " << v << '\n'; };
  put("e_nom_kwh", format_double(c.bess.e_nom));
  put("p_max_kw", format_double(c.bess.p_max));
  put("beta", format_double(c.bess.beta));
  put("e_min_kwh", format_double(c.bess.e_min));
  put("e_max_kwh", format_double(c.bess.e_max));
  put("horizon_h", format_double(c.grid.horizon_h()));
  put("slots", std::to_string(c.grid.slots()));
  put("f_nominal_hz", format_double(c.fr.f_nominal));
  put("delta_f_max_hz", format_double(c.fr.delta_f_max));
  put("mode", to_string(c.mode));
  put("price_fr", format_double(c.revenue.price_fr));
  put("price_dispatch", format_double(c.revenue.price_dispatch));
  put("pivot_rule", c.solver.rule == lp::PivotRule::bland ? "bland" : "dantzig");
  put("pivot_tol", format_double(c.solver.pivot_tol));
  put("feasibility_tol", format_double(c.solver.feasibility_tol));
  put("optimality_tol", format_double(c.solver.optimality_tol));
  put("equilibrate", c.solver.equilibrate ? "true" : "false");
  put("max_iterations", std::to_string(c.solver.max_iterations));
  put("seed", std::to_string(c.seed));
  put("days", std::to_string(c.days));
  put("history_days", std::to_string(c.history_days));
  put("confidence_z", format_double(c.confidence_z));
  put("e_init_kwh", format_double(c.e_init_kwh));
  put("perfect_forecast", c.perfect_forecast ? "true" : "false");
  put("persistence_window_s", std::to_string(c.persistence_window_s));
  put("epoch_start", std::to_string(c.epoch_start));
  const SyntheticParams& s = c.synthetic;
  put("synthetic.base_kw", format_double(s.base_kw));
  put("synthetic.office_peak_kw", format_double(s.office_peak_kw));
  put("synthetic.pv_kwp", format_double(s.pv_kwp));
  put("synthetic.band_kw", format_double(s.band_kw));
  put("synthetic.band_frac", format_double(s.band_frac));
  put("synthetic.band_pv_frac", format_double(s.band_pv_frac));
  put("synthetic.band_day_spread", format_double(s.band_day_spread));
  put("synthetic.slot_noise", format_double(s.slot_noise));
  put("synthetic.intra_noise_kw", format_double(s.intra_noise_kw));
  put("synthetic.ou_tau_s", format_double(s.ou_tau_s));
  put("synthetic.ou_sigma_hz", format_double(s.ou_sigma_hz));
  put("synthetic.contained", s.contained ? "true" : "false");
  put("synthetic.stress_factor", format_double(s.stress_factor));
  return out.str();
}

}  // namespace bess
