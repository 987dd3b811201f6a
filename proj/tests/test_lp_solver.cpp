#include <doctest.h>

#include <random>
#include <vector>

#include "bess/errors.hpp"
#include "bess/lp_solver.hpp"
#include "oracles.hpp"

using namespace bess;
using namespace bess::lp;

namespace {

struct RandomLp {
  LinearProgram lp;
  std::vector<oracle::Row> rows;  // constraints and bounds, for the oracle
};

RandomLp random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomLp r{LinearProgram::with_variables(n), {}};
  for (std::size_t j = 0; j < n; ++j) r.lp.objective[j] = u(rng);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> a(n);
    for (double& v : a) v = u(rng);
    const double b = 2.0 * u(rng);  // negative rhs exercises phase 1
    r.lp.add_row(a, b);
    r.rows.push_back({a, b});
  }
  // box keeps every instance bounded; some variables get free lower bounds
  for (std::size_t j = 0; j < n; ++j) {
    if (rng() % 3 == 0) r.lp.var_lower[j] = -kInf;
    r.lp.var_upper[j] = 5.0;
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    r.rows.push_back({e, 5.0});
    if (std::isfinite(r.lp.var_lower[j])) {
      e[j] = -1.0;
      r.rows.push_back({e, 0.0});
    }
  }
  std::vector<double> sum(n, -1.0);
  r.lp.add_row(sum, 5.0);
  r.rows.push_back({sum, 5.0});
  return r;
}

}  // namespace

TEST_CASE("single variable") {
  LinearProgram lp = LinearProgram::with_variables(1);
  lp.objective = {1.0};
  lp.add_row({1.0}, 5.0);
  const Solution s = solve(lp);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.x[0] == doctest::Approx(5.0));
  CHECK(s.objective_value == doctest::Approx(5.0));
}

TEST_CASE("degenerate optimal face") {
  LinearProgram lp = LinearProgram::with_variables(2);
  lp.objective = {1.0, 1.0};
  lp.add_row({1.0, 1.0}, 1.0);
  const Solution s = solve(lp);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective_value == doctest::Approx(1.0));
  CHECK(s.x[0] + s.x[1] == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded") {
  LinearProgram inf = LinearProgram::with_variables(1);
  inf.add_row({1.0}, -1.0);
  CHECK(solve(inf).status == Status::infeasible);

  LinearProgram unb = LinearProgram::with_variables(2);
  unb.objective = {1.0, 0.0};
  unb.add_row({-1.0, 1.0}, 1.0);
  CHECK(solve(unb).status == Status::unbounded);
}

TEST_CASE("bounds: shifted, reflected and free variables") {
  LinearProgram lp = LinearProgram::with_variables(3);
  lp.objective = {1.0, -1.0, 1.0};
  lp.var_lower = {2.0, -kInf, -kInf};
  lp.var_upper = {4.0, 3.0, kInf};
  lp.add_row({0.0, -1.0, 0.0}, 7.0);  // x1 >= -7
  lp.add_row({0.0, 0.0, 1.0}, -2.5);  // x2 <= -2.5
  const Solution s = solve(lp);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.x[0] == doctest::Approx(4.0));
  CHECK(s.x[1] == doctest::Approx(-7.0));
  CHECK(s.x[2] == doctest::Approx(-2.5));
}

TEST_CASE("malformed programs rejected") {
  LinearProgram lp = LinearProgram::with_variables(2);
  lp.var_lower[0] = 3.0;
  lp.var_upper[0] = 1.0;
  CHECK_THROWS_AS(solve(lp), ValidationError);
  LinearProgram nan = LinearProgram::with_variables(1);
  nan.add_row({std::nan("")}, 1.0);
  CHECK_THROWS_AS(solve(nan), ValidationError);
}

TEST_CASE("random programs agree with vertex enumeration") {
  std::mt19937_64 rng(2024);
  int optimal = 0, infeasible = 0;
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 1 + rng() % 6;
    const std::size_t m = 1 + rng() % 6;
    RandomLp r = random_lp(rng, n, m);
    const oracle::LpResult ref = oracle::best_vertex(r.rows, r.lp.objective);
    for (PivotRule rule : {PivotRule::bland, PivotRule::dantzig_bland_fallback}) {
      SolverOptions opts;
      opts.rule = rule;
      const Solution s = solve(r.lp, opts);
      if (!ref.feasible) {
        CHECK(s.status == Status::infeasible);
      } else {
        REQUIRE(s.status == Status::optimal);
        CHECK(s.objective_value == doctest::Approx(ref.value).epsilon(1e-6).scale(1.0));
        CHECK(max_relative_violation(r.lp, s.x) <= 1e-7);
      }
    }
    (ref.feasible ? optimal : infeasible)++;
  }
  CHECK(optimal >= 10);
}

TEST_CASE("objective scaling and determinism") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 10; ++t) {
    RandomLp r = random_lp(rng, 4, 5);
    const Solution a = solve(r.lp);
    LinearProgram scaled = r.lp;
    for (double& c : scaled.objective) c *= 8.0;
    const Solution b = solve(scaled);
    CHECK(a.status == b.status);
    if (a.status == Status::optimal) {
      CHECK(b.objective_value == doctest::Approx(8.0 * a.objective_value).epsilon(1e-9).scale(1.0));
    }
    const Solution again = solve(r.lp);
    CHECK(again.x == a.x);
    CHECK(again.iterations == a.iterations);
  }
}

TEST_CASE("degenerate cycling-prone program terminates") {
  // Beale's example cycles under the textbook largest-coefficient rule.
  LinearProgram lp = LinearProgram::with_variables(4);
  lp.objective = {0.75, -150.0, 0.02, -6.0};
  lp.add_row({0.25, -60.0, -0.04, 9.0}, 0.0);
  lp.add_row({0.5, -90.0, -0.02, 3.0}, 0.0);
  lp.add_row({0.0, 0.0, 1.0, 0.0}, 1.0);
  for (PivotRule rule : {PivotRule::bland, PivotRule::dantzig_bland_fallback}) {
    SolverOptions opts;
    opts.rule = rule;
    opts.equilibrate = false;
    const Solution s = solve(lp, opts);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.objective_value == doctest::Approx(0.05));
  }
}
