#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fracvar/gamma.hpp"
#include "fracvar/oracle.hpp"
#include "fracvar/variational.hpp"

using namespace fracvar;
using namespace fracvar::oracle;

TEST_CASE("power-rule coefficients") {
  // Gamma(3)/Gamma(5/2) — the half-order derivative of x^2
  const PowerRuleCase cfd2(Anchor::Left, PowerKind::Cfd, 0.5, 2.0);
  CHECK(cfd2.coefficient() == doctest::Approx(1.5045055561).epsilon(1e-9));
  CHECK(cfd2.result_exponent() == doctest::Approx(1.5).epsilon(1e-14));

  // Gamma(1)/Gamma(3/2) = 2/sqrt(pi) — half-order integral of 1
  const PowerRuleCase rlfi0(Anchor::Left, PowerKind::Rlfi, 0.5, 0.0);
  CHECK(rlfi0.coefficient() == doctest::Approx(1.1283791671).epsilon(1e-9));
  CHECK(rlfi0.result_exponent() == doctest::Approx(0.5).epsilon(1e-14));

  // the Caputo derivative annihilates constants
  const PowerRuleCase cfd0(Anchor::Left, PowerKind::Cfd, 0.5, 0.0);
  CHECK(cfd0.coefficient() == 0.0);

  // Riemann-Liouville does not: x^{-1/2}/Gamma(1/2)
  const PowerRuleCase rlfd0(Anchor::Left, PowerKind::Rlfd, 0.5, 0.0);
  CHECK(rlfd0.coefficient() ==
        doctest::Approx(1.0 / fracvar::gamma(0.5)).epsilon(1e-12));
  CHECK(rlfd0.result_exponent() == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("power-rule case validation") {
  CHECK_THROWS_AS(PowerRuleCase(Anchor::Left, PowerKind::Rlfi, 0.5, -1.0),
                  std::domain_error);
  // Caputo of x^p with 0 < p <= order is not covered by the rule
  CHECK_THROWS_AS(PowerRuleCase(Anchor::Left, PowerKind::Cfd, 0.5, 0.3),
                  std::domain_error);
  CHECK_THROWS_AS(PowerRuleCase(Anchor::Left, PowerKind::Rlfd, 0.5, -0.2),
                  std::domain_error);
}

TEST_CASE("reference values and the singular anchor") {
  const PowerRuleCase c(Anchor::Left, PowerKind::Rlfi, 0.5, 1.0);
  const double x = 0.36;
  CHECK(power_reference(c, x, 0.0, 1.0) ==
        doctest::Approx(c.coefficient() * std::pow(x, 1.5)).epsilon(1e-13));

  const PowerRuleCase right(Anchor::Right, PowerKind::Cfd, 0.5, 2.0);
  CHECK(power_reference(right, 0.25, 0.0, 1.0) ==
        doctest::Approx(right.coefficient() * std::pow(0.75, 1.5))
            .epsilon(1e-13));

  // negative result exponent diverges at the anchor
  const PowerRuleCase sing(Anchor::Left, PowerKind::Rlfd, 0.5, 0.0);
  CHECK_THROWS_AS(power_reference(sing, 0.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("classical-limit solutions") {
  const Grid g(0.0, 1.0, 201);
  const Trajectory line = classical_limit_solution("line", g, 0.5, 2.5);
  CHECK(line.values[0].front() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(line.values[0].back() == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(line.values[0][100] == doctest::Approx(1.5).epsilon(1e-12));

  const Trajectory parab =
      classical_limit_solution("area_constrained", g, 0.0, 0.0, 1.0);
  CHECK(parab.values[0].front() == 0.0);
  CHECK(parab.values[0].back() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(trapezoid(parab.component(0)) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(parab.values[0][100] == doctest::Approx(1.5).epsilon(1e-12));

  const Trajectory flat = classical_limit_solution("free_end_constant", g, 0.7);
  for (double v : flat.values[0]) CHECK(v == 0.7);

  CHECK_THROWS_AS(classical_limit_solution("no_such_tag", g),
                  std::invalid_argument);
}

TEST_CASE("brute-force first variation agrees with the analytic value") {
  Problem p{FracParams(0.5, 0.5, 0.5),
            Grid(0.0, 1.0, 201),
            1,
            parse("y^2", 1),
            {},
            {},
            {BoundaryCondition{}},
            {},
            {}};
  const Trajectory y = Trajectory::sample(
      p.grid, 1, [](std::size_t, double x) { return x * (1.0 - x); });
  const Trajectory h = Trajectory::sample(
      p.grid, 1,
      [](std::size_t, double x) { return x * x * (1.0 - x); });
  double expected = 0.0;
  for (std::size_t k = 0; k < p.grid.size(); ++k)
    expected += trapezoid_weight(p.grid, k) * 2.0 * y.values[0][k] *
                h.values[0][k];
  const double got = brute_force_first_variation(p, y, h);
  CHECK(got == doctest::Approx(expected).epsilon(1e-9));

  // linear in the direction
  Trajectory h2 = h;
  for (double& v : h2.values[0]) v *= 3.0;
  CHECK(brute_force_first_variation(p, y, h2) ==
        doctest::Approx(3.0 * got).epsilon(1e-7));
}

TEST_CASE("brute-force variation vanishes at a flat functional") {
  Problem p{FracParams(0.5, 0.5, 0.5),
            Grid(0.0, 1.0, 101),
            1,
            parse("x^2", 1),  // no trajectory dependence
            {},
            {},
            {BoundaryCondition{}},
            {},
            {}};
  const Trajectory y(p.grid, 1);
  const Trajectory h = Trajectory::sample(
      p.grid, 1, [](std::size_t, double x) { return x * (1.0 - x); });
  CHECK(std::abs(brute_force_first_variation(p, y, h)) < 1e-12);
}

TEST_CASE("verify suite passes and reacts to fault injection") {
  const auto cases = run_verify_suite();
  CHECK(cases.size() >= 8);
  for (const VerifyCase& c : cases) {
    INFO(c.name, ": ", c.observed, " vs ", c.tolerance);
    CHECK(c.passed);
  }

  fracvar::testing::corrupt_gamma(1e-3);
  const auto corrupted = run_verify_suite();
  bool any_failed = false;
  for (const VerifyCase& c : corrupted) any_failed |= !c.passed;
  CHECK(any_failed);

  fracvar::testing::corrupt_gamma(0.0);
  const auto restored = run_verify_suite();
  for (const VerifyCase& c : restored) CHECK(c.passed);
}
