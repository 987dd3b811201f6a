#pragma once

// Run configuration: a key=value text file, '#' starts a comment.
// Unknown keys are errors. Settings are collected first and resolved in a
// fixed order, so e_min_frac follows whatever e_nom_kwh ends up being.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bess/budgets.hpp"
#include "bess/lp_solver.hpp"
#include "bess/scenario.hpp"
#include "bess/scheduler.hpp"

namespace bess {

using Settings = std::map<std::string, std::string>;

struct Config {
  BessParams bess;
  TimeGrid grid;
  FrParams fr;
  ObjectiveMode mode = ObjectiveMode::max_alpha;
  RevenueModel revenue;
  lp::SolverOptions solver;

  std::uint64_t seed = 1;
  std::size_t days = 31;
  std::size_t history_days = 60;  // synthetic days used to fit the envelope
  double confidence_z = 1.96;
  double e_init_kwh = 280.0;
  bool perfect_forecast = false;
  std::size_t persistence_window_s = 10;
  std::int64_t epoch_start = 1704067200;  // 2024-01-01T00:00:00Z
  SyntheticParams synthetic;

  void validate() const;
};

/// Every recognised key.
const std::vector<std::string>& config_keys();

/// Parses key=value lines. Throws DataError naming the line.
Settings parse_settings(std::istream& in, const std::string& source = "config");
Settings load_settings(const std::filesystem::path& path);

/// Builds and validates a Config from defaults plus the given settings.
Config make_config(const Settings& settings);

/// key=value text that make_config reads back to the same Config.
std::string dump_config(const Config& cfg);

}  // namespace bess
