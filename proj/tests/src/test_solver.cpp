#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "fracvar/gamma.hpp"
#include "fracvar/oracle.hpp"
#include "fracvar/solver.hpp"

using namespace fracvar;

namespace {

Problem make_problem(const std::string& lagrangian, double alpha, double beta,
                     double gamma, std::size_t n, std::size_t dims = 1) {
  Problem p{FracParams(alpha, beta, gamma),
            Grid(0.0, 1.0, n),
            dims,
            parse(lagrangian, dims),
            {},
            {},
            std::vector<BoundaryCondition>(dims),
            {},
            {}};
  return p;
}

}  // namespace

TEST_CASE("zero data yields the zero extremal") {
  Problem p = make_problem("v^2", 0.6, 0.7, 0.4, 101);
  const SolveReport r = solve_basic(p);
  CHECK(r.converged);
  CHECK(r.cost < 1e-12);
  CHECK(r.trajectory.max_node_distance(Trajectory(p.grid, 1)) < 1e-8);
}

TEST_CASE("manufactured half-order extremal") {
  // L = (v - c x)^2 with c = Gamma(5/2): minimized exactly by y = x^{3/2}
  // under the left Caputo operator of order 1/2
  Problem p = make_problem("v^2", 0.5, 0.5, 1.0, 501);
  p.lagrangian = parse("(v - c*x)^2", 1, {"c"});
  p.parameters["c"] = fracvar::gamma(2.5);
  p.boundary[0].right = 1.0;
  const SolveReport r = solve_basic(p);
  CHECK(r.converged);
  CHECK(r.cost < 1e-5);
  const Trajectory star = Trajectory::sample(
      p.grid, 1, [](std::size_t, double x) { return std::pow(x, 1.5); });
  CHECK(r.trajectory.max_node_distance(star) < 1e-2);
  CHECK(r.el_residual_max < 5e-2);
}

TEST_CASE("classical limit reproduces the straight line") {
  Problem p = make_problem("v^2", 0.999, 0.999, 1.0, 401);
  p.boundary[0].right = 1.0;
  const SolveReport r = solve_basic(p);
  CHECK(r.converged);
  const Trajectory line =
      oracle::classical_limit_solution("line", p.grid, 0.0, 1.0);
  CHECK(r.trajectory.max_node_distance(line) < 2e-2);
  CHECK(r.cost == doctest::Approx(1.0).epsilon(5e-2));
}

TEST_CASE("iteration cap reports non-convergence") {
  Problem p = make_problem("v^2 + y^4 + sin(3*y)", 0.6, 0.7, 0.4, 101);
  p.boundary[0].right = 1.0;
  p.options.max_iter = 1;
  const SolveReport r = solve_basic(p);
  CHECK_FALSE(r.converged);
  CHECK(!r.diagnostic.empty());
}

TEST_CASE("free right endpoint satisfies the natural boundary condition") {
  // L = v^2 with y(0) = 1 and a free right end: the minimizer is constant
  Problem p = make_problem("v^2", 0.5, 0.5, 1.0, 201);
  p.boundary[0].left = 1.0;
  p.boundary[0].right_kind = RightBoundaryKind::Free;
  const SolveReport r = solve_free_endpoint(p);
  CHECK(r.converged);
  REQUIRE(r.transversality_residuals.count(0) == 1);
  CHECK(std::abs(r.transversality_residuals.at(0)) < 5e-2);
  CHECK_FALSE(r.bound_active.at(0));
  const Trajectory flat =
      oracle::classical_limit_solution("free_end_constant", p.grid, 1.0);
  CHECK(r.trajectory.max_node_distance(flat) < 1e-4);
}

TEST_CASE("slack upper bound matches the free solve") {
  Problem base = make_problem("v^2", 0.5, 0.5, 1.0, 201);
  base.boundary[0].left = 1.0;
  base.boundary[0].right_kind = RightBoundaryKind::Free;
  const SolveReport free_r = solve_free_endpoint(base);

  Problem bounded = base;
  bounded.boundary[0].right_kind = RightBoundaryKind::UpperBounded;
  bounded.boundary[0].right = 10.0;  // far above the free endpoint value
  const SolveReport r = solve_free_endpoint(bounded);
  CHECK(r.converged);
  CHECK_FALSE(r.bound_active.at(0));
  CHECK(r.trajectory.max_node_distance(free_r.trajectory) < 1e-6);
}

TEST_CASE("binding upper bound pins the endpoint") {
  // without the bound the endpoint would drift toward 2
  Problem p = make_problem("v^2 + 0.1*(y - 2)^2", 0.5, 0.5, 1.0, 401);
  p.boundary[0].left = 1.0;
  p.boundary[0].right_kind = RightBoundaryKind::UpperBounded;
  p.boundary[0].right = 1.02;
  const SolveReport r = solve_free_endpoint(p);
  CHECK(r.converged);
  CHECK(r.bound_active.at(0));
  CHECK(r.trajectory.values[0].back() == doctest::Approx(1.02).epsilon(1e-12));
  CHECK(std::abs(r.complementary_slackness.at(0)) < 1e-6);
}

TEST_CASE("isoperimetric area constraint in the classical limit") {
  Problem p = make_problem("v^2", 0.999, 0.999, 1.0, 401);
  p.constraints.push_back(
      {parse("y", 1), ConstraintRelation::Equality, 1.0});
  const SolveReport r = solve_isoperimetric(p);
  CHECK(r.converged);
  CHECK_FALSE(r.abnormal);
  CHECK(std::abs(r.constraint_residuals.at(0)) < 1e-8);
  CHECK(std::abs(r.multipliers.at(0)) > 1.0);  // constraint does real work
  const Trajectory parab =
      oracle::classical_limit_solution("area_constrained", p.grid, 0.0, 0.0,
                                       1.0);
  CHECK(r.trajectory.max_node_distance(parab) < 2e-2);
}

TEST_CASE("constraint already satisfied by the unconstrained extremal") {
  Problem p = make_problem("v^2", 0.6, 0.7, 0.4, 201);
  p.constraints.push_back(
      {parse("y", 1), ConstraintRelation::Equality, 0.0});
  const SolveReport r = solve_isoperimetric(p);
  CHECK(r.converged);
  CHECK(std::abs(r.constraint_residuals.at(0)) < 1e-8);
  CHECK(std::abs(r.multipliers.at(0)) < 1e-6);
  CHECK(r.cost < 1e-10);
}

TEST_CASE("degenerate constraint flags the abnormal case") {
  // G = int v^2 with target 0 at the zero extremal: dG vanishes in every
  // admissible direction, so no normal multiplier exists
  Problem p = make_problem("v^2", 0.6, 0.7, 0.4, 101);
  p.constraints.push_back(
      {parse("v^2", 1), ConstraintRelation::Equality, 0.0});
  const SolveReport r = solve_isoperimetric(p);
  CHECK(r.abnormal);
}

TEST_CASE("inactive inequality keeps a zero multiplier bitwise") {
  Problem p = make_problem("v^2", 0.6, 0.7, 0.4, 201);
  const Trajectory star = Trajectory::sample(
      p.grid, 1, [](std::size_t, double x) {
        return x * x * (1.0 - x) * (1.0 - x);
      });
  p.grid_parameters.emplace("g", operator_values(p, star)[0]);
  p.lagrangian = parse("(v - g)^2", 1, {"g"});
  // int y* is about 0.033, far below the bound
  p.constraints.push_back(
      {parse("y", 1), ConstraintRelation::InequalityLe, 10.0});
  const SolveReport r = solve_isoperimetric_ineq(p);
  CHECK(r.converged);
  CHECK(r.multipliers.at(0) == 0.0);
  CHECK(std::abs(r.complementary_slackness.at(0)) == 0.0);
}

TEST_CASE("binding inequality activates with the right multiplier sign") {
  // classical-limit area bound: forcing int y <= -0.5 bends the zero
  // extremal down to the parabola 6c x(1-x)
  Problem p = make_problem("v^2", 0.999, 0.999, 1.0, 401);
  p.constraints.push_back(
      {parse("y", 1), ConstraintRelation::InequalityLe, -0.5});
  const SolveReport r = solve_isoperimetric_ineq(p);
  CHECK(r.converged);
  CHECK(std::abs(r.constraint_residuals.at(0)) < 1e-6);
  CHECK(r.multipliers.at(0) < 0.0);
  CHECK(std::abs(r.complementary_slackness.at(0)) < 1e-4);
  const Trajectory parab = oracle::classical_limit_solution(
      "area_constrained", p.grid, 0.0, 0.0, -0.5);
  CHECK(r.trajectory.max_node_distance(parab) < 2e-2);
}

TEST_CASE("mixed active and inactive inequalities") {
  Problem p = make_problem("v^2", 0.999, 0.999, 1.0, 401);
  p.constraints.push_back(
      {parse("y", 1), ConstraintRelation::InequalityLe, -0.5});
  p.constraints.push_back(
      {parse("x*y", 1), ConstraintRelation::InequalityLe, 50.0});
  const SolveReport r = solve_isoperimetric_ineq(p);
  CHECK(r.converged);
  CHECK(r.multipliers.at(0) < 0.0);
  CHECK(r.multipliers.at(1) == 0.0);
}

TEST_CASE("regularity determinant separates dependent constraints") {
  Problem p = make_problem("v^2", 0.6, 0.7, 0.4, 201);
  p.boundary[0].right = 1.0;
  const Trajectory y = Trajectory::sample(
      p.grid, 1, [](std::size_t, double x) { return x; });

  Problem dup = p;
  dup.constraints.push_back({parse("y", 1), ConstraintRelation::Equality, 0.5});
  dup.constraints.push_back({parse("y", 1), ConstraintRelation::Equality, 0.5});
  const auto probes2 = standard_probes(dup, 2);
  CHECK(std::abs(check_regularity(dup, y, probes2)) < 1e-10);

  Problem ind = p;
  ind.constraints.push_back({parse("y", 1), ConstraintRelation::Equality, 0.5});
  ind.constraints.push_back(
      {parse("x*y", 1), ConstraintRelation::Equality, 0.3});
  const auto probesi = standard_probes(ind, 2);
  CHECK(std::abs(check_regularity(ind, y, probesi)) > 1e-3);
}

TEST_CASE("analytic gradient matches finite differences") {
  Problem p = make_problem("v^2 + sin(y)*v + y^3 + x*y", 0.55, 0.7, 0.35, 41);
  p.boundary[0].right = 0.5;
  Trajectory y = Trajectory::sample(
      p.grid, 1,
      [](std::size_t, double x) { return 0.5 * x + 0.2 * x * (1.0 - x); });
  const std::vector<double> grad = functional_gradient(p, y);
  const std::size_t n = p.grid.size();
  REQUIRE(grad.size() == n - 2);
  for (std::size_t k = 1; k + 1 < n; k += 4) {
    const double h = 1e-6;
    Trajectory yp = y, ym = y;
    yp.values[0][k] += h;
    ym.values[0][k] -= h;
    const double fd =
        (evaluate_functional(p, yp) - evaluate_functional(p, ym)) / (2 * h);
    const double scale = std::max(1.0, std::abs(fd));
    CHECK(std::abs(grad[k - 1] - fd) / scale < 1e-5);
  }
}

TEST_CASE("initial trajectory interpolates the boundary data") {
  Problem p = make_problem("v1^2 + v2^2", 0.5, 0.5, 0.5, 11, 2);
  p.boundary[0].left = 1.0;
  p.boundary[0].right = 3.0;
  p.boundary[1].left = -1.0;
  p.boundary[1].right_kind = RightBoundaryKind::Free;
  const Trajectory t = initial_trajectory(p);
  CHECK(t.values[0].front() == 1.0);
  CHECK(t.values[0].back() == 3.0);
  CHECK(t.values[0][5] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(t.values[1].front() == -1.0);
  CHECK(t.values[1].back() == doctest::Approx(0.0).epsilon(1e-12));
}
