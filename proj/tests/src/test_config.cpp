#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "fracvar/config.hpp"
#include "fracvar/oracle.hpp"

using namespace fracvar;

namespace {

const char* kBase = R"({
  "interval": {"a": 0.0, "b": 1.0},
  "orders": {"alpha": 0.6, "beta": 0.7, "gamma": 0.4},
  "grid": {"n": 101},
  "dims": 1,
  "lagrangian": "v^2 + k*y^2",
  "parameters": {"k": 2.5},
  "boundary": [{"left": 0.0, "right": 1.0}]
})";

std::string expect_field(const std::string& text) {
  try {
    parse_problem_config(text);
  } catch (const ConfigError& e) {
    return e.field;
  }
  return "(no error)";
}

}  // namespace

TEST_CASE("well-formed document resolves to a problem") {
  const ProblemConfig cfg = parse_problem_config(kBase);
  const Problem& p = cfg.problem;
  CHECK(p.grid.a() == 0.0);
  CHECK(p.grid.b() == 1.0);
  CHECK(p.grid.size() == 101);
  CHECK(p.params.alpha == 0.6);
  CHECK(p.params.beta == 0.7);
  CHECK(p.params.gamma == 0.4);
  CHECK(p.dims == 1);
  CHECK(p.parameters.at("k") == 2.5);
  CHECK(p.boundary[0].right_kind == RightBoundaryKind::Fixed);
  CHECK(p.boundary[0].right == 1.0);
  CHECK_FALSE(cfg.oracle.has_value());
  CHECK(print(p.lagrangian) == "v1^2+k*y1^2");
}

TEST_CASE("errors carry the offending field path") {
  CHECK(expect_field("{") == "(document)");
  CHECK(expect_field("[1, 2]") == "(document)");
  CHECK(expect_field(R"({"interval": {"a": 0, "b": 1}})") != "(no error)");

  std::string t = kBase;
  CHECK(expect_field(t.substr(0, t.size() - 2) + ", \"bogus\": 1}") == "bogus");

  auto rep = [&](const std::string& from, const std::string& to) {
    std::string s = kBase;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK(expect_field(rep("\"alpha\": 0.6", "\"alpha\": 1.6")) == "orders");
  CHECK(expect_field(rep("\"alpha\": 0.6", "\"alpha\": \"x\"")) ==
        "orders.alpha");
  CHECK(expect_field(rep("\"n\": 101", "\"n\": 2")) == "grid.n");
  CHECK(expect_field(rep("\"n\": 101", "\"n\": -5")) == "grid.n");
  CHECK(expect_field(rep("\"a\": 0.0, \"b\": 1.0", "\"a\": 2.0, \"b\": 1.0")) ==
        "interval");
  CHECK(expect_field(rep("{\"a\": 0.0, \"b\": 1.0}",
                         "{\"a\": 0.0, \"b\": 1.0, \"c\": 2}")) ==
        "interval.c");
  CHECK(expect_field(rep("v^2 + k*y^2", "v^2 + q*y")) == "lagrangian");
  CHECK(expect_field(rep("v^2 + k*y^2", "v^2 +")) == "lagrangian");
  CHECK(expect_field(rep("[{\"left\": 0.0, \"right\": 1.0}]", "[]")) ==
        "boundary");
  CHECK(expect_field(rep("\"right\": 1.0", "\"right\": \"loose\"")) ==
        "boundary[0].right");
  CHECK(expect_field(rep("\"right\": 1.0",
                         "\"right\": {\"upper\": 1, \"lower\": 0}")) ==
        "boundary[0].right.lower");
}

TEST_CASE("boundary forms") {
  std::string t = kBase;
  t.replace(t.find("\"right\": 1.0"), 12, "\"right\": \"free\"");
  CHECK(parse_problem_config(t).problem.boundary[0].right_kind ==
        RightBoundaryKind::Free);

  std::string u = kBase;
  u.replace(u.find("\"right\": 1.0"), 12, "\"right\": {\"upper\": 0.75}");
  const Problem& p = parse_problem_config(u).problem;
  CHECK(p.boundary[0].right_kind == RightBoundaryKind::UpperBounded);
  CHECK(p.boundary[0].right == 0.75);
}

TEST_CASE("constraints") {
  std::string t = kBase;
  t.insert(t.rfind('}'), R"(,
  "constraints": [
    {"integrand": "y", "relation": "eq", "target": 1.0},
    {"integrand": "x*y", "relation": "le", "target": 0.5}
  ])");
  const Problem& p = parse_problem_config(t).problem;
  REQUIRE(p.constraints.size() == 2);
  CHECK(p.constraints[0].relation == ConstraintRelation::Equality);
  CHECK(p.constraints[1].relation == ConstraintRelation::InequalityLe);
  CHECK(p.constraints[1].target == 0.5);

  std::string bad = t;
  bad.replace(bad.find("\"le\""), 4, "\"ge\"");
  CHECK(expect_field(bad) == "constraints[1].relation");
}

TEST_CASE("solver overrides") {
  std::string t = kBase;
  t.insert(t.rfind('}'), R"(,
  "solver": {"tol_g": 1e-10, "max_iter": 77, "lbfgs_memory": 5})");
  const Problem& p = parse_problem_config(t).problem;
  CHECK(p.options.tol_g == 1e-10);
  CHECK(p.options.max_iter == 77);
  CHECK(p.options.lbfgs_memory == 5);
  CHECK(p.options.tol_c == 1e-8);  // untouched default

  std::string bad = t;
  bad.replace(bad.find("max_iter"), 8, "max_iters");
  CHECK(expect_field(bad) == "solver.max_iters");
}

TEST_CASE("grid parameters are sampled and pushed through operators") {
  std::string t = kBase;
  t.replace(t.find("v^2 + k*y^2"), 11, "(v - g)^2 + k*0");
  t.insert(t.rfind('}'), R"(,
  "grid_parameters": {
    "g": {"operator": "combined-caputo", "expression": "x^2*(1-x)^2"}
  })");
  const ProblemConfig cfg = parse_problem_config(t);
  const Problem& p = cfg.problem;
  REQUIRE(p.grid_parameters.count("g") == 1);
  const SampledFunction direct = combined_caputo(
      SampledFunction::sample(p.grid,
                              [](double x) {
                                return x * x * (1 - x) * (1 - x);
                              }),
      p.params);
  const SampledFunction& got = p.grid_parameters.at("g");
  for (std::size_t k = 0; k < p.grid.size(); ++k)
    CHECK(got[k] == doctest::Approx(direct[k]).epsilon(1e-13));

  std::string bad = t;
  bad.replace(bad.find("combined-caputo"), 15, "sideways");
  CHECK(expect_field(bad) == "grid_parameters.g.operator");

  // "none" samples the expression directly
  std::string plain = t;
  plain.replace(plain.find("combined-caputo"), 15, "none");
  const Problem& q = parse_problem_config(plain).problem;
  CHECK(q.grid_parameters.at("g")[p.grid.size() / 2] ==
        doctest::Approx(std::pow(0.5, 2) * std::pow(0.5, 2)).epsilon(1e-13));
}

TEST_CASE("grid resizing re-samples grid parameters") {
  std::string t = kBase;
  t.replace(t.find("v^2 + k*y^2"), 11, "(v - g)^2 + k*0");
  t.insert(t.rfind('}'), R"(,
  "grid_parameters": {
    "g": {"operator": "cfd-left", "expression": "x^3"}
  })");
  const ProblemConfig cfg = parse_problem_config(t);
  const ProblemConfig big = with_grid_size(cfg, 201);
  CHECK(big.problem.grid.size() == 201);
  const SampledFunction direct = cfd_left(
      SampledFunction::sample(big.problem.grid,
                              [](double x) { return x * x * x; }),
      big.problem.params.alpha);
  const SampledFunction& got = big.problem.grid_parameters.at("g");
  REQUIRE(got.size() == 201);
  for (std::size_t k = 0; k < got.size(); ++k)
    CHECK(got[k] == doctest::Approx(direct[k]).epsilon(1e-13));
}

TEST_CASE("oracle declarations") {
  std::string tagd = kBase;
  tagd.insert(tagd.rfind('}'), R"(,
  "oracle": {"tag": "line"})");
  const ProblemConfig cfg = parse_problem_config(tagd);
  REQUIRE(cfg.oracle.has_value());
  const Trajectory t = sample_oracle(cfg, cfg.problem.grid);
  CHECK(t.values[0].front() == doctest::Approx(0.0));
  CHECK(t.values[0].back() == doctest::Approx(1.0));

  std::string expr = kBase;
  expr.insert(expr.rfind('}'), R"(,
  "oracle": {"expression": "x^2"})");
  const ProblemConfig ecfg = parse_problem_config(expr);
  const Trajectory e = sample_oracle(ecfg, ecfg.problem.grid);
  CHECK(e.values[0][50] == doctest::Approx(0.25).epsilon(1e-12));

  std::string both = kBase;
  both.insert(both.rfind('}'), R"(,
  "oracle": {"tag": "line", "expression": "x"})");
  CHECK(expect_field(both) == "oracle");

  std::string neither = kBase;
  neither.insert(neither.rfind('}'), R"(,
  "oracle": {})");
  CHECK(expect_field(neither) == "oracle");

  CHECK_THROWS_AS(sample_oracle(parse_problem_config(kBase),
                                parse_problem_config(kBase).problem.grid),
                  std::invalid_argument);
}

TEST_CASE("operator names") {
  CHECK(operator_kind_from_name("rlfi-left") == OperatorKind::RlfiLeft);
  CHECK(operator_kind_from_name("dual-rl") == OperatorKind::DualRl);
  CHECK_THROWS_AS(operator_kind_from_name("caputo"), std::invalid_argument);

  const Grid g(0.0, 1.0, 51);
  const auto f = SampledFunction::sample(g, [](double x) { return x * x; });
  const FracParams p(0.5, 0.7, 0.3);
  const SampledFunction a = apply_named_operator("cfd-left", f, p);
  const SampledFunction b = cfd_left(f, 0.5);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(a[k] == b[k]);
  // right-sided names read beta
  const SampledFunction c = apply_named_operator("cfd-right", f, p);
  const SampledFunction d = cfd_right(f, 0.7);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(c[k] == d[k]);
}

TEST_CASE("file loading") {
  const std::string path = "/tmp/fracvar_test_config.json";
  {
    std::ofstream out(path);
    out << kBase;
  }
  const ProblemConfig cfg = load_problem_config(path);
  CHECK(cfg.problem.grid.size() == 101);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_problem_config(path), ConfigError);
}
