#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "bess/data_io.hpp"
#include "bess/errors.hpp"

using namespace bess;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path p = fs::temp_directory_path() / ("bess_io_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

std::string forecast_text(std::size_t n) {
  std::string s = "slot,l_hat_kw,l_up_kw,l_down_kw\n";
  for (std::size_t k = 0; k < n; ++k) s += std::to_string(k) + ",100,110,90\n";
  return s;
}

std::size_t error_row(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.row();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST_CASE("shortest round-trip formatting") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("forecast parsing") {
  SUBCASE("minimal two-slot file") {
    std::istringstream in("slot,l_hat_kw,l_up_kw,l_down_kw\r\n0,1.5,2,1\r\n 1 , 3 , 4 , 2 \r\n");
    const auto s = io::parse_forecast(in, TimeGrid(2.0, 2));
    CHECK(s.forecast == std::vector<double>{1.5, 3.0});
    CHECK(s.upper == std::vector<double>{2.0, 4.0});
    CHECK(s.lower == std::vector<double>{1.0, 2.0});
  }
  SUBCASE("inverted band names the row") {
    std::string text = forecast_text(10);
    text.replace(text.find("6,100,110,90"), 12, "6,100,80,90");
    std::istringstream in(text);
    CHECK(error_row([&] { io::parse_forecast(in, TimeGrid(10.0, 10)); }) == 7);
    std::istringstream again(text);
    CHECK_THROWS_WITH_AS(io::parse_forecast(again, TimeGrid(10.0, 10)),
                         doctest::Contains("row 7"), DataError);
  }
  SUBCASE("malformed inputs") {
    const TimeGrid g(2.0, 2);
    auto row_of = [&](const std::string& text) {
      return error_row([&] {
        std::istringstream in(text);
        io::parse_forecast(in, g);
      });
    };
    CHECK(row_of("") == 0);
    CHECK(row_of("a,b,c,d\n0,1,1,1\n1,1,1,1\n") == 0);
    CHECK(row_of(forecast_text(1)) == 0);
    CHECK(row_of(forecast_text(3)) == 3);
    CHECK(row_of("slot,l_hat_kw,l_up_kw,l_down_kw\n0,1,1,1\n1,nan,1,1\n") == 2);
    CHECK(row_of("slot,l_hat_kw,l_up_kw,l_down_kw\n0,1,1,1\n1,inf,inf,1\n") == 2);
    CHECK(row_of("slot,l_hat_kw,l_up_kw,l_down_kw\n0,1,1,1\n1,1;1,1\n") == 2);
    CHECK(row_of("slot,l_hat_kw,l_up_kw,l_down_kw\n0,1,1,1\n1,1,1\n") == 2);
    CHECK(row_of("slot,l_hat_kw,l_up_kw,l_down_kw\n1,1,1,1\n0,1,1,1\n") == 1);
    CHECK(row_of("slot,l_hat_kw,l_up_kw,l_down_kw\n0,1,1,1\n1,1 000,2000,1\n") == 2);
    CHECK(row_of("slot,l_hat_kw,l_up_kw,l_down_kw\n0,5,4,3\n1,1,1,1\n") == 1);
  }
}

TEST_CASE("frequency and realization files") {
  SUBCASE("frequency ordering and plausibility") {
    std::istringstream ok("epoch_seconds,frequency_hz\n10,50.01\n11,49.99\n");
    const auto r = io::parse_frequency(ok);
    CHECK(r.timestamps == std::vector<std::int64_t>{10, 11});
    std::istringstream dup("epoch_seconds,frequency_hz\n10,50\n10,50\n");
    CHECK(error_row([&] { io::parse_frequency(dup); }) == 2);
    std::istringstream frac("epoch_seconds,frequency_hz\n10.5,50\n");
    CHECK(error_row([&] { io::parse_frequency(frac); }) == 1);
    std::istringstream wild("epoch_seconds,frequency_hz\n10,70\n");
    CHECK_THROWS_AS(io::parse_frequency(wild), DataError);
  }
  SUBCASE("realization must be gap-free and complete") {
    std::istringstream gap("epoch_seconds,load_kw\n0,1\n2,1\n");
    CHECK(error_row([&] { io::parse_realized_load(gap, 2); }) == 2);
    std::istringstream short_in("epoch_seconds,load_kw\n0,1\n");
    CHECK_THROWS_AS(io::parse_realized_load(short_in, 2), DataError);
  }
  SUBCASE("files round-trip") {
    const fs::path dir = temp_dir();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 0.05);
    FrequencyRecord rec;
    std::vector<double> load;
    for (std::int64_t t = 0; t < 500; ++t) {
      rec.timestamps.push_back(1704067200 + t);
      rec.frequency.push_back(50.0 + n(rng));
      load.push_back(150.0 + 100.0 * n(rng));
    }
    io::write_frequency(dir / "f.csv", rec);
    const auto back = io::load_frequency(dir / "f.csv");
    CHECK(back.timestamps == rec.timestamps);
    CHECK(back.frequency == rec.frequency);
    io::write_realized_load(dir / "l.csv", 1704067200, load);
    CHECK(io::load_realized_load(dir / "l.csv", 500) == load);
    CHECK_THROWS_AS(io::load_frequency(dir / "missing.csv"), DataError);
    fs::remove_all(dir);
  }
}

TEST_CASE("plan round-trip") {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> n(0.0, 50.0);
  for (int t = 0; t < 20; ++t) {
    io::PlanFile pf;
    pf.plan.alpha = std::abs(n(rng)) * 10.0;
    for (std::size_t k = 0; k < 288; ++k) {
      pf.plan.offset.push_back(n(rng));
      pf.plan.dispatch_plan.push_back(150.0 + n(rng));
    }
    pf.plan.fallback_used = t % 3 == 0;
    pf.plan.stage = pf.plan.fallback_used ? FallbackStage::energy_relaxed : FallbackStage::none;
    pf.plan.relaxation_kwh = pf.plan.fallback_used ? 1.25 : 0.0;
    pf.e_init_kwh = 280.0 + n(rng);
    pf.date = "2024-03-0" + std::to_string(1 + t % 9);
    std::ostringstream out;
    io::write_plan(out, pf);
    std::istringstream in(out.str());
    const io::PlanFile back = io::parse_plan(in);
    CHECK(back.plan.alpha == pf.plan.alpha);
    CHECK(back.plan.offset == pf.plan.offset);
    CHECK(back.plan.dispatch_plan == pf.plan.dispatch_plan);
    CHECK(back.plan.fallback_used == pf.plan.fallback_used);
    CHECK(back.plan.stage == pf.plan.stage);
    CHECK(back.plan.relaxation_kwh == pf.plan.relaxation_kwh);
    CHECK(back.e_init_kwh == pf.e_init_kwh);
    CHECK(back.date == pf.date);
  }
  std::istringstream no_alpha("# e_init_kwh=1\n# date=x\nslot,f_kw,p_hat_kw\n0,1,2\n");
  CHECK_THROWS_AS(io::parse_plan(no_alpha), DataError);
  std::istringstream neg("# alpha_kw_per_hz=-1\n# e_init_kwh=1\n# date=x\nslot,f_kw,p_hat_kw\n0,1,2\n");
  CHECK_THROWS_AS(io::parse_plan(neg), DataError);
}

TEST_CASE("envelope round-trip") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0.0, 0.1);
  FrequencyEnvelope env;
  env.grid = TimeGrid{};
  env.confidence_z = 1.96;
  for (std::size_t k = 0; k < 288; ++k) {
    const double mu = n(rng);
    const double sd = std::abs(n(rng));
    env.mean.push_back(mu);
    env.std.push_back(sd);
    env.w_up.push_back(mu + 1.96 * sd);
    env.w_down.push_back(mu - 1.96 * sd);
  }
  std::ostringstream out;
  io::write_envelope(out, env);
  std::istringstream in(out.str());
  const FrequencyEnvelope back = io::parse_envelope(in);
  CHECK(back.grid == env.grid);
  CHECK(back.confidence_z == env.confidence_z);
  CHECK(back.mean == env.mean);
  CHECK(back.std == env.std);
  CHECK(back.w_up == env.w_up);
  CHECK(back.w_down == env.w_down);

  std::istringstream bad("# confidence_z=1.96\n# horizon_h=1\nslot,w_down,mean,w_up,std\n0,1,0,2,0.1\n");
  CHECK(error_row([&] { io::parse_envelope(bad); }) == 1);
}

TEST_CASE("report round-trip") {
  HorizonReport r;
  for (std::size_t d = 1; d <= 3; ++d) {
    DayResult day;
    day.day = d;
    day.soe_0 = 40.0 + static_cast<double>(d) / 3.0;
    day.alpha = d == 2 ? 0.0 : 123.456 * static_cast<double>(d);
    day.fallback_used = d == 2;
    day.stage = d == 2 ? FallbackStage::alpha_zero : FallbackStage::none;
    day.eps_rms = 0.1 * static_cast<double>(d);
    day.clamp_events = d;
    r.days.push_back(day);
  }
  compute_aggregates(r);
  const auto j = io::to_json(r);
  const HorizonReport back = io::report_from_json(j);
  REQUIRE(back.days.size() == 3);
  CHECK(back.days[0].soe_0 == r.days[0].soe_0);
  CHECK(back.days[2].alpha == r.days[2].alpha);
  CHECK(back.days[1].stage == FallbackStage::alpha_zero);
  CHECK(back.days[2].clamp_events == 3);
  CHECK(back.mean.alpha == r.mean.alpha);
  CHECK(back.fallback_days() == std::vector<std::size_t>{2});
  CHECK(j["fallback_days"] == nlohmann::json::array({2}));
  CHECK_THROWS_AS(io::report_from_json(nlohmann::json::object()), DataError);
  nlohmann::json broken = j;
  broken["days"][0].erase("alpha");
  CHECK_THROWS_AS(io::report_from_json(broken), DataError);
}
