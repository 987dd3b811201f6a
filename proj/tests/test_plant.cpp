#include <doctest.h>

#include <random>
#include <vector>

#include "bess/errors.hpp"
#include "bess/plant.hpp"

using namespace bess;

namespace {

PlantState state_at(double soe, double beta = 0.96) {
  PlantState s;
  s.soe = soe;
  s.bess.beta = beta;
  return s;
}

}  // namespace

TEST_CASE("zero power leaves the state unchanged") {
  const PlantStep st = apply_power(state_at(200.0), 0.0, 1.0);
  CHECK(st.next.soe == 200.0);
  CHECK(st.delta_kwh == 0.0);
  CHECK_FALSE(st.clamped);
}

TEST_CASE("ideal battery integrates") {
  CHECK(apply_power(state_at(200.0, 1.0), 100.0, 1.0).next.soe == 300.0);
  CHECK(apply_power(state_at(200.0, 1.0), -100.0, 1.0).next.soe == 100.0);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-200.0, 200.0);
  PlantState s = state_at(280.0, 1.0);
  double ideal = 280.0;
  for (int i = 0; i < 3600; ++i) {
    const double b = u(rng);
    s = apply_power(s, b, 1.0 / 3600.0).next;
    ideal += b / 3600.0;
  }
  CHECK(s.soe == doctest::Approx(ideal).epsilon(1e-12));
}

TEST_CASE("lossy cycle drifts toward depletion") {
  PlantState s = state_at(280.0);
  s = apply_power(s, 100.0, 1.0).next;
  CHECK(s.soe == doctest::Approx(280.0 + 96.0));
  s = apply_power(s, -100.0, 1.0).next;
  const double hand = 100.0 * (1.0 - 0.96) + 100.0 * (1.0 / 0.96 - 1.0);
  CHECK(280.0 - s.soe == doctest::Approx(hand).epsilon(1e-12));
  CHECK(280.0 - s.soe == doctest::Approx(8.17).epsilon(0.01 / 8.17));
}

TEST_CASE("random closed cycles always lose energy, bookkeeping adds up") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 300.0);
  for (int t = 0; t < 50; ++t) {
    PlantState s = state_at(280.0);
    std::vector<double> b(20);
    double net = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      b[i] = (i % 2 == 0 ? 1.0 : -1.0) * u(rng);
      net += b[i];
    }
    b.back() = -net;
    if (std::abs(b.back()) > s.bess.p_max) continue;
    double sum_delta = 0.0;
    for (double p : b) {
      const PlantStep st = apply_power(s, p, 0.1);
      sum_delta += st.delta_kwh;
      s = st.next;
    }
    CHECK(s.soe < 280.0);
    CHECK(sum_delta == doctest::Approx(s.soe - 280.0).epsilon(1e-12));
  }
}

TEST_CASE("physical clamp") {
  const PlantStep full = apply_power(state_at(559.99), 720.0, 1.0 / 3600.0);
  CHECK(full.clamped);
  CHECK(full.next.soe == 560.0);
  CHECK(full.next.clamp_events == 1);
  CHECK(full.applied_kw < 720.0);
  CHECK(full.applied_kw * 0.96 / 3600.0 == doctest::Approx(full.delta_kwh));

  const PlantStep empty = apply_power(state_at(0.01), -720.0, 1.0 / 3600.0);
  CHECK(empty.clamped);
  CHECK(empty.next.soe == 0.0);
}

TEST_CASE("contract violations") {
  CHECK_THROWS_AS(apply_power(state_at(100.0), 721.0, 1.0), ValidationError);
  CHECK_THROWS_AS(apply_power(state_at(100.0), 10.0, 0.0), ValidationError);
  CHECK_THROWS_AS(apply_power(state_at(100.0), std::nan(""), 1.0), ValidationError);
}
