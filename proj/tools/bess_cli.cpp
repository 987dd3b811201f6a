// bess_cli: envelope fitting, day-ahead scheduling, closed-loop simulation
// and reporting for a feeder-connected battery.
//
// Exit status: 0 ok, 1 invalid input, 2 infeasible without fallback,
// 3 internal error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bess/config.hpp"
#include "bess/data_io.hpp"
#include "bess/errors.hpp"
#include "bess/freq_stats.hpp"
#include "bess/pipeline.hpp"
#include "bess/scheduler.hpp"
#include "bess/simulator.hpp"

namespace fs = std::filesystem;
using namespace bess;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kInfeasible = 2, kInternal = 3 };

struct Common {
  std::string config;
  std::optional<double> e_init;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> set;
  std::string out = ".";
  bool synthetic = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--e-init", c.e_init, "initial stored energy, kWh");
  cmd->add_option("--mode", c.mode, "objective")
      ->check(CLI::IsMember({"max-alpha", "revenue", "feasibility"}));
  cmd->add_option("--seed", c.seed, "seed for synthetic data");
  cmd->add_option("--set", c.set, "override a config key (key=value), repeatable");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_flag("--synthetic", c.synthetic, "use seeded synthetic data instead of input files");
}

Config resolve(const Common& c, std::map<std::string, std::string> extra = {}) {
  Settings s = c.config.empty() ? Settings{} : load_settings(c.config);
  for (const std::string& kv : c.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
    s[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  for (auto& [k, v] : extra) s[k] = v;
  if (c.e_init) s["e_init_kwh"] = io::format_double(*c.e_init);
  if (c.mode) s["mode"] = *c.mode;
  if (c.seed) s["seed"] = std::to_string(*c.seed);
  return make_config(s);
}

fs::path out_dir(const Common& c) {
  fs::path p(c.out);
  fs::create_directories(p);
  return p;
}

std::string utc_date(std::int64_t epoch) {
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_seconds{seconds{epoch}});
  const year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::int64_t day_seconds(const Config& cfg) {
  return static_cast<std::int64_t>(cfg.grid.seconds_per_slot() * cfg.grid.slots());
}

ScheduleInputs schedule_inputs(const Config& cfg, LoadScenarios scen, FrequencyEnvelope env) {
  ScheduleInputs in;
  in.bess = cfg.bess;
  in.e_init = cfg.e_init_kwh;
  in.scen = std::move(scen);
  in.env = std::move(env);
  in.fr = cfg.fr;
  in.grid = cfg.grid;
  return in;
}

void print_normality(const FrequencyEnvelope& env, std::span<const std::vector<double>> days) {
  std::vector<double> last;
  for (const auto& d : days) last.push_back(d.back());
  const std::size_t n = env.mean.size();
  std::printf("envelope: %zu slots from %zu days, z = %g\n", n, days.size(), env.confidence_z);
  std::printf("  W_f at last slot: mean %.5f Hz*h, std %.5f Hz*h, band [%.5f, %.5f]\n",
              env.mean[n - 1], env.std[n - 1], env.w_down[n - 1], env.w_up[n - 1]);
  if (last.size() >= 30) {
    const NormalityResult nr = normality_diagnostic(last);
    std::printf("  chi-square normality: statistic %.3f, critical %.3f (%zu bins, %zu dof): %s\n",
                nr.statistic, nr.critical_value, nr.bins, nr.dof,
                nr.reject ? "normality rejected at 5%" : "not rejected");
  } else {
    std::printf("  chi-square normality: skipped, fewer than 30 days\n");
  }
}

int cmd_fit_envelope(const Common& c, const std::vector<std::string>& freq_files) {
  const Config cfg = resolve(c);
  std::vector<std::vector<double>> days;
  if (c.synthetic) {
    if (!freq_files.empty()) throw ValidationError("fit-envelope: --synthetic and --freq are exclusive");
    const std::uint64_t hseed = derive_seed(cfg.seed, 0x48495354ULL);
    days = synthetic_wf_history(hseed, cfg.history_days, cfg.synthetic, cfg.fr, cfg.grid);
  } else {
    if (freq_files.empty()) throw ValidationError("fit-envelope: give --freq files or --synthetic");
    for (const std::string& f : freq_files) {
      for (const FrequencyRecord& day : split_utc_days(io::load_frequency(f))) {
        try {
          days.push_back(compute_wf(day, cfg.fr, cfg.grid));
        } catch (const ValidationError& e) {
          std::fprintf(stderr, "skipping day starting at %lld: %s\n",
                       static_cast<long long>(day.timestamps.front()), e.what());
        }
      }
    }
  }
  if (days.size() < 2) throw ValidationError("fit-envelope: need at least two usable days");
  const FrequencyEnvelope env = fit_envelope(days, cfg.confidence_z, cfg.grid);
  const fs::path path = out_dir(c) / "envelope.csv";
  io::write_envelope(path, env);
  print_normality(env, days);
  std::printf("wrote %s\n", path.string().c_str());
  return kOk;
}

void print_plan_summary(const ScheduleInputs& in, const DayAheadPlan& plan) {
  double f_sum = 0.0;
  for (double f : plan.offset) f_sum += f;
  std::printf("alpha            %.3f kW/Hz\n", plan.alpha);
  std::printf("mean offset F    %.3f kW\n", f_sum / static_cast<double>(plan.offset.size()));
  std::printf("fallback         %s\n", to_string(plan.stage));
  if (plan.stage == FallbackStage::energy_relaxed) {
    std::printf("energy relaxation %.3f kWh\n", plan.relaxation_kwh);
  }
  const auto binding = binding_constraints(in, plan);
  std::map<std::string, std::vector<std::size_t>> by_kind;
  for (const auto& b : binding) by_kind[to_string(b.kind)].push_back(b.slot);
  std::printf("binding constraints: %zu\n", binding.size());
  for (const auto& [kind, slots] : by_kind) {
    std::printf("  %-13s %zu slots:", kind.c_str(), slots.size());
    for (std::size_t i = 0; i < slots.size() && i < 12; ++i) std::printf(" %zu", slots[i]);
    if (slots.size() > 12) std::printf(" ...");
    std::printf("\n");
  }
}

int cmd_schedule(const Common& c, const std::string& forecast, const std::string& envelope,
                 std::size_t day, std::string date, bool no_fallback) {
  const Config cfg = resolve(c);
  if (day == 0) throw ValidationError("schedule: --day is 1-based");
  LoadScenarios scen;
  FrequencyEnvelope env;
  if (c.synthetic) {
    env = synthetic_envelope(cfg);
    scen = synthetic_day_case(cfg, env, day - 1).scen;
    if (date.empty()) date = utc_date(cfg.epoch_start + static_cast<std::int64_t>(day - 1) * day_seconds(cfg));
  } else {
    if (forecast.empty() || envelope.empty()) {
      throw ValidationError("schedule: give --forecast and --envelope, or --synthetic");
    }
    scen = io::load_forecast(forecast, cfg.grid);
    env = io::read_envelope(envelope);
    if (!(env.grid == cfg.grid)) throw DimensionError("schedule: envelope grid differs from config grid");
  }
  const ScheduleInputs in = schedule_inputs(cfg, std::move(scen), std::move(env));
  const DayAheadPlan plan = solve_day_ahead(in, cfg.mode, cfg.revenue, cfg.solver);
  if (no_fallback && plan.fallback_used) {
    std::fprintf(stderr, "schedule: day is infeasible with alpha > 0 (would fall back to %s)\n",
                 to_string(plan.stage));
    return kInfeasible;
  }
  const fs::path path = out_dir(c) / "plan.csv";
  io::write_plan(path, io::PlanFile{plan, cfg.e_init_kwh, date});
  print_plan_summary(in, plan);
  std::printf("wrote %s\n", path.string().c_str());
  return kOk;
}

DayRealization load_realization(const Config& cfg, const std::string& load, const std::string& freq) {
  const std::size_t seconds = static_cast<std::size_t>(day_seconds(cfg));
  DayRealization r;
  r.load_kw = io::load_realized_load(load, seconds);
  const FrequencyRecord rec = io::load_frequency(freq);
  if (rec.frequency.size() != seconds ||
      rec.timestamps.back() - rec.timestamps.front() != static_cast<std::int64_t>(seconds) - 1) {
    throw DataError(freq, 0, "expected " + std::to_string(seconds) + " consecutive 1 s samples");
  }
  r.freq_hz = rec.frequency;
  return r;
}

class OutputSink {
 public:
  OutputSink(fs::path root, bool traces) : root_(std::move(root)), traces_(traces) {}

  fs::path day_dir(std::size_t day) const {
    char name[32];
    std::snprintf(name, sizeof(name), "day_%02zu", day);
    return root_ / name;
  }

  void operator()(std::size_t day, const TraceRow& row) {
    if (!traces_) return;
    if (day != day_ || !writer_) {
      fs::create_directories(day_dir(day));
      writer_ = std::make_unique<io::TraceWriter>(day_dir(day) / "trace.csv");
      day_ = day;
    }
    writer_->write(row);
  }

  void finish_day(const DayResult& r, const Config& cfg) {
    writer_.reset();
    fs::create_directories(day_dir(r.day));
    io::write_budget_csv(day_dir(r.day) / "budget.csv", r);
    const std::int64_t epoch = cfg.epoch_start + static_cast<std::int64_t>(r.day - 1) * day_seconds(cfg);
    io::write_plan(day_dir(r.day) / "plan.csv",
                   io::PlanFile{r.plan, r.soe_0 / 100.0 * cfg.bess.e_nom, utc_date(epoch)});
  }

 private:
  fs::path root_;
  bool traces_;
  std::size_t day_ = 0;
  std::unique_ptr<io::TraceWriter> writer_;
};

void print_horizon(const HorizonReport& r) {
  std::printf("days %zu, mean alpha %.1f kW/Hz, mean eps_rms %.4f kW\n", r.days.size(), r.mean.alpha,
              r.mean.eps_rms);
  const auto fb = r.fallback_days();
  std::printf("alpha = 0 fallback days:");
  if (fb.empty()) std::printf(" none");
  for (std::size_t d : fb) std::printf(" %zu", d);
  std::printf("\n");
}

int cmd_simulate(const Common& c, std::optional<std::size_t> days, const std::string& plan_file,
                 const std::string& forecast, const std::string& envelope, const std::string& load,
                 const std::string& freq, bool no_trace, bool perfect) {
  std::map<std::string, std::string> extra;
  if (days) extra["days"] = std::to_string(*days);
  if (perfect) extra["perfect_forecast"] = "true";
  const Config cfg = resolve(c, extra);
  const fs::path root = out_dir(c);
  OutputSink out(root, !no_trace);
  DayTraceSink sink = [&out](std::size_t d, const TraceRow& row) { out(d, row); };

  HorizonReport report;
  if (c.synthetic) {
    if (!plan_file.empty() || !forecast.empty() || !load.empty() || !freq.empty()) {
      throw ValidationError("simulate: --synthetic excludes input files");
    }
    report = simulate_synthetic(cfg, sink);
  } else {
    if (forecast.empty() || envelope.empty() || load.empty() || freq.empty()) {
      throw ValidationError("simulate: give --forecast, --envelope, --load and --freq, or --synthetic");
    }
    const FrequencyEnvelope env = io::read_envelope(envelope);
    if (!(env.grid == cfg.grid)) throw DimensionError("simulate: envelope grid differs from config grid");
    ScheduleInputs in = schedule_inputs(cfg, io::load_forecast(forecast, cfg.grid), env);
    const DayRealization realized = load_realization(cfg, load, freq);
    const SimulationOptions opts = simulation_options(cfg);
    TraceSink day_sink = [&sink](const TraceRow& r) { sink(1, r); };
    DayResult r;
    if (!plan_file.empty()) {
      const io::PlanFile pf = io::read_plan(plan_file);
      in.e_init = pf.e_init_kwh;
      r = run_day(in, pf.plan, realized, opts, day_sink);
    } else {
      r = run_day(in, realized, opts, day_sink);
    }
    r.day = 1;
    report.days.push_back(std::move(r));
    compute_aggregates(report);
  }
  for (const DayResult& d : report.days) out.finish_day(d, cfg);
  io::write_report(root / "report.json", report);
  print_horizon(report);
  std::printf("wrote %s\n", (root / "report.json").string().c_str());
  return kOk;
}

int cmd_export(const Common& c, std::size_t day) {
  const Config cfg = resolve(c);
  if (day == 0) throw ValidationError("export-synthetic: --day is 1-based");
  const fs::path root = out_dir(c);
  const FrequencyEnvelope env = synthetic_envelope(cfg);
  const DayCase dc = synthetic_day_case(cfg, env, day - 1);
  const std::int64_t epoch = cfg.epoch_start + static_cast<std::int64_t>(day - 1) * day_seconds(cfg);
  io::write_envelope(root / "envelope.csv", env);
  io::write_forecast(root / "forecast.csv", dc.scen);
  io::write_realized_load(root / "load.csv", epoch, dc.realized.load_kw);
  FrequencyRecord rec;
  rec.frequency = dc.realized.freq_hz;
  for (std::size_t i = 0; i < rec.frequency.size(); ++i) {
    rec.timestamps.push_back(epoch + static_cast<std::int64_t>(i));
  }
  io::write_frequency(root / "frequency.csv", rec);
  std::printf("wrote envelope.csv, forecast.csv, load.csv, frequency.csv to %s\n", root.string().c_str());
  return kOk;
}

int cmd_report(const std::vector<std::string>& files) {
  HorizonReport all;
  for (const std::string& f : files) {
    HorizonReport r = io::read_report(f);
    for (DayResult& d : r.days) all.days.push_back(std::move(d));
  }
  for (std::size_t i = 0; i < all.days.size(); ++i) all.days[i].day = i + 1;
  compute_aggregates(all);
  std::printf("%-6s %10s %14s %11s %12s %12s\n", "", "SOE_0 [%]", "alpha [kW/Hz]", "F_avg [kW]",
              "SOE_min [%]", "SOE_max [%]");
  const std::pair<const char*, const AggregateRow*> rows[] = {
      {"Mean", &all.mean}, {"Max", &all.max}, {"Min", &all.min}};
  for (const auto& [name, r] : rows) {
    std::printf("%-6s %10.1f %14.1f %11.1f %12.1f %12.1f\n", name, r->soe_0, r->alpha, r->f_avg,
                r->soe_min, r->soe_max);
  }
  std::printf("\n");
  print_horizon(all);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead dispatch and frequency regulation scheduling for a feeder battery"};
  app.require_subcommand(1);

  Common fit_c, sched_c, sim_c;

  auto* fit = app.add_subcommand("fit-envelope", "fit the W_f confidence envelope from frequency archives");
  add_common(fit, fit_c);
  std::vector<std::string> freq_files;
  fit->add_option("--freq", freq_files, "frequency CSV files (epoch_seconds,frequency_hz)")
      ->check(CLI::ExistingFile);

  auto* sched = app.add_subcommand("schedule", "solve the day-ahead problem and write plan.csv");
  add_common(sched, sched_c);
  std::string sched_forecast, sched_envelope, date;
  std::size_t day = 1;
  bool no_fallback = false;
  sched->add_option("--forecast", sched_forecast, "forecast CSV")->check(CLI::ExistingFile);
  sched->add_option("--envelope", sched_envelope, "envelope CSV")->check(CLI::ExistingFile);
  sched->add_option("--day", day, "synthetic day to schedule, 1-based");
  sched->add_option("--date", date, "date written into the plan header");
  sched->add_flag("--no-fallback", no_fallback, "exit 2 instead of falling back to alpha = 0");

  auto* sim = app.add_subcommand("simulate", "run the closed loop and write report.json and traces");
  add_common(sim, sim_c);
  std::optional<std::size_t> days;
  std::string plan_file, sim_forecast, sim_envelope, load, freq;
  bool no_trace = false, perfect = false;
  sim->add_option("--days", days, "number of synthetic days");
  sim->add_option("--plan", plan_file, "execute this plan instead of scheduling")->check(CLI::ExistingFile);
  sim->add_option("--forecast", sim_forecast, "forecast CSV")->check(CLI::ExistingFile);
  sim->add_option("--envelope", sim_envelope, "envelope CSV")->check(CLI::ExistingFile);
  sim->add_option("--load", load, "realized 1 s prosumption CSV")->check(CLI::ExistingFile);
  sim->add_option("--freq", freq, "realized 1 s frequency CSV")->check(CLI::ExistingFile);
  sim->add_flag("--no-trace", no_trace, "skip the per-second trace files");
  sim->add_flag("--perfect-forecast", perfect, "use the realized load as short-term forecast");

  auto* exp = app.add_subcommand("export-synthetic", "write one synthetic day as input files");
  Common exp_c;
  add_common(exp, exp_c);
  std::size_t exp_day = 1;
  exp->add_option("--day", exp_day, "synthetic day, 1-based");

  auto* rep = app.add_subcommand("report", "aggregate report.json files into a mean/max/min table");
  std::vector<std::string> reports;
  rep->add_option("reports", reports, "report.json files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*fit) return cmd_fit_envelope(fit_c, freq_files);
    if (*sched) return cmd_schedule(sched_c, sched_forecast, sched_envelope, day, date, no_fallback);
    if (*sim) {
      return cmd_simulate(sim_c, days, plan_file, sim_forecast, sim_envelope, load, freq, no_trace,
                          perfect);
    }
    if (*rep) return cmd_report(reports);
    if (*exp) return cmd_export(exp_c, exp_day);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kInfeasible;
  } catch (const InternalError& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternal;
  }
  return kInternal;
}
