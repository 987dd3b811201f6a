#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bess/errors.hpp"
#include "bess/plant.hpp"
#include "bess/realtime.hpp"

using namespace bess;

namespace {

DayAheadPlan flat_plan(std::size_t n, double alpha, double p_hat, double f = 0.0) {
  DayAheadPlan p;
  p.alpha = alpha;
  p.offset.assign(n, f);
  p.dispatch_plan.assign(n, p_hat);
  return p;
}

}  // namespace

TEST_CASE("droop setpoint") {
  const FrParams fr;
  CHECK(fr_setpoint(50.0, flat_plan(1, 584.0, 0.0), fr) == 0.0);
  CHECK(fr_setpoint(50.1, flat_plan(1, 584.0, 0.0), fr) == doctest::Approx(58.4));
  CHECK(fr_setpoint(50.3, flat_plan(1, 584.0, 0.0), fr) == doctest::Approx(0.2 * 584.0));
  CHECK(fr_setpoint(49.5, flat_plan(1, 100.0, 0.0), fr) == doctest::Approx(-20.0));
}

TEST_CASE("saturation thresholds partition the rating exactly") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> a(0.0, 5000.0);
  std::uniform_real_distribution<double> p(1.0, 2000.0);
  std::uniform_real_distribution<double> d(0.01, 1.0);
  for (int i = 0; i < 10000; ++i) {
    FrParams fr;
    fr.delta_f_max = d(rng);
    const double pmax = p(rng);
    const auto lim = saturation_limits(a(rng), pmax, fr);
    CHECK(lim.fr_kw + lim.dispatch_kw == pmax);
    CHECK(lim.fr_kw >= 0.0);
    CHECK(lim.dispatch_kw >= 0.0);
  }
}

TEST_CASE("dispatch setpoint") {
  ControllerState st;
  SUBCASE("on plan") {
    const auto c = dispatch_setpoint(st, 100.0, 100.0 * 300.0, 300, 720.0);
    CHECK(c.kw == 0.0);
  }
  SUBCASE("constant shortfall at the start of the slot") {
    const auto c = dispatch_setpoint(st, 100.0, 90.0 * 300.0, 300, 720.0);
    CHECK(c.eps_kw == doctest::Approx(10.0));
    CHECK(c.kw == doctest::Approx(10.0));
  }
  SUBCASE("last second carries the whole residual") {
    st.second_in_slot = 299;
    st.accumulated_kws = 299.0 * 99.0;
    const auto c = dispatch_setpoint(st, 100.0, 99.0, 300, 720.0);
    CHECK(c.eps_kw == doctest::Approx(1.0));
    CHECK(c.kw == doctest::Approx(300.0));
    const auto clamped = dispatch_setpoint(st, 100.0, 99.0, 300, 50.0);
    CHECK(clamped.kw == 50.0);
    CHECK(clamped.saturated);
  }
  SUBCASE("overrun") {
    st.second_in_slot = 300;
    CHECK_THROWS_AS(dispatch_setpoint(st, 0.0, 0.0, 300, 1.0), ValidationError);
  }
}

TEST_CASE("controller on an ideal feeder") {
  // prosumption equals the forecast and frequency is nominal: nothing to do
  RealtimeController ctl(flat_plan(2, 300.0, 150.0), 720.0, FrParams{}, 300);
  for (int s = 0; s < 600; ++s) {
    const Setpoint sp = ctl.compute(50.0);
    CHECK(sp.b_total == 0.0);
    const auto close = ctl.commit(150.0 + sp.b_total);
    if (close) CHECK(close->eps_kw == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(ctl.finished());
  CHECK_THROWS_AS(ctl.compute(50.0), ValidationError);
}

TEST_CASE("both components saturated reach the rating exactly") {
  const double alpha = 1000.0;
  RealtimeController ctl(flat_plan(1, alpha, 1000.0, 1000.0), 720.0, FrParams{}, 300);
  const Setpoint sp = ctl.compute(50.5);
  CHECK(sp.fr_saturated);
  CHECK(sp.dispatch_saturated);
  CHECK(sp.b_total == 720.0);
}

TEST_CASE("slot average tracks the plan with a perfect short-term forecast") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 5.0);
  std::normal_distribution<double> df(0.0, 0.03);
  const std::size_t sps = 300;
  const std::size_t slots = 6;
  std::vector<double> load(sps * slots), freq(sps * slots);
  for (auto& l : load) l = 150.0 + noise(rng);
  for (auto& f : freq) f = 50.0 + df(rng);
  const DayAheadPlan plan = flat_plan(slots, 400.0, 155.0, 5.0);
  ShortTermForecaster oracle_fc = [&load, sps](const ForecastQuery& q) {
    double sum = 0.0;
    const std::size_t begin = q.slot * sps + q.second_in_slot;
    for (std::size_t i = 0; i < q.remaining_s; ++i) sum += load[begin + i];
    return sum / static_cast<double>(q.remaining_s);
  };
  RealtimeController ctl(plan, 720.0, FrParams{}, sps, oracle_fc);
  std::size_t closed = 0;
  for (std::size_t s = 0; s < load.size(); ++s) {
    const Setpoint sp = ctl.compute(freq[s]);
    CHECK_FALSE(sp.dispatch_saturated);
    const auto c = ctl.commit(load[s] + sp.b_total);
    if (c) {
      ++closed;
      // independent recomputation of the slot mean of (P - B_fr)
      CHECK(std::abs(c->eps_kw) <= 1e-6);
    }
  }
  CHECK(closed == slots);
}

TEST_CASE("superposition: no regulation leaves pure dispatch tracking") {
  RealtimeController with(flat_plan(1, 0.0, 160.0, 10.0), 720.0, FrParams{}, 300);
  const Setpoint a = with.compute(50.15);
  CHECK(a.b_fr == 0.0);
  CHECK(a.b_total == a.b_dispatch);
  CHECK(a.b_dispatch == doctest::Approx(10.0));
}

TEST_CASE("bad frequency samples hold the last regulation setpoint") {
  RealtimeController ctl(flat_plan(1, 100.0, 0.0), 720.0, FrParams{}, 300);
  const Setpoint a = ctl.compute(50.05);
  ctl.commit(a.b_total);
  const Setpoint b = ctl.compute(std::nan(""));
  CHECK(b.data_quality_event);
  CHECK(b.b_fr == a.b_fr);
  CHECK(ctl.data_quality_events() == 1);
}

TEST_CASE("protocol misuse") {
  RealtimeController ctl(flat_plan(1, 0.0, 0.0), 720.0, FrParams{}, 300);
  CHECK_THROWS_AS(ctl.commit(0.0), ValidationError);
  ctl.compute(50.0);
  CHECK_THROWS_AS(ctl.compute(50.0), ValidationError);
  DayAheadPlan bad = flat_plan(2, 0.0, 0.0);
  bad.offset.pop_back();
  CHECK_THROWS_AS(RealtimeController(bad, 720.0, FrParams{}, 300), DimensionError);
}
