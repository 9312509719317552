#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracvar/config.hpp"
#include "fracvar/gamma.hpp"
#include "fracvar/oracle.hpp"
#include "fracvar/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;

// 17 significant digits: doubles round-trip exactly through the CSV.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::filesystem::path output_dir(const std::string& flag_value) {
  std::filesystem::path dir = flag_value;
  if (dir.empty()) {
    const char* env = std::getenv("FRACVAR_OUTPUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

fracvar::SampledFunction sample_expression(const std::string& text,
                                           const fracvar::Grid& grid) {
  const fracvar::ExprAst ast = fracvar::parse(text, 0);
  return fracvar::SampledFunction::sample(grid, [&](double x) {
    fracvar::Bindings b;
    b.x = x;
    return fracvar::eval(ast, b);
  });
}

fracvar::SolveReport dispatch_solve(const fracvar::Problem& prob) {
  bool has_ineq = false;
  for (const auto& c : prob.constraints)
    has_ineq |= c.relation == fracvar::ConstraintRelation::InequalityLe;
  if (!prob.constraints.empty())
    return has_ineq ? fracvar::solve_isoperimetric_ineq(prob)
                    : fracvar::solve_isoperimetric(prob);
  for (const auto& bc : prob.boundary)
    if (bc.right_kind != fracvar::RightBoundaryKind::Fixed)
      return fracvar::solve_free_endpoint(prob);
  return fracvar::solve_basic(prob);
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const fracvar::Problem& prob,
                          const fracvar::Trajectory& y) {
  const auto v = fracvar::operator_values(prob, y);
  std::ofstream out(path, std::ios::binary);
  out << "x";
  for (std::size_t i = 1; i <= prob.dims; ++i) out << ",y_" << i;
  for (std::size_t i = 1; i <= prob.dims; ++i) out << ",v_" << i;
  out << "\n";
  for (std::size_t k = 0; k < prob.grid.size(); ++k) {
    out << fmt(prob.grid.node(k));
    for (std::size_t i = 0; i < prob.dims; ++i)
      out << "," << fmt(y.values[i][k]);
    for (std::size_t i = 0; i < prob.dims; ++i) out << "," << fmt(v[i][k]);
    out << "\n";
  }
}

nlohmann::json report_json(const fracvar::SolveReport& rep) {
  nlohmann::json j;
  j["converged"] = rep.converged;
  j["cost"] = rep.cost;
  j["el_residual_max"] = rep.el_residual_max;
  j["iterations"] = rep.iterations;
  j["gradient_norm"] = rep.gradient_norm;
  j["abnormal"] = rep.abnormal;
  j["multipliers"] = rep.multipliers;
  j["constraint_residuals"] = rep.constraint_residuals;
  j["complementary_slackness"] = rep.complementary_slackness;
  j["bound_active"] = rep.bound_active;
  j["transversality"] = nlohmann::json::object();
  for (const auto& [idx, t] : rep.transversality_residuals)
    j["transversality"][std::to_string(idx)] = t;
  j["diagnostic"] = rep.diagnostic;
  return j;
}

int cmd_deriv(const std::string& op, const std::string& f_text, double a,
              double b, std::size_t n, double alpha,
              std::optional<double> beta_opt, double gamma_w) {
  const double beta = beta_opt.value_or(alpha);
  const fracvar::FracParams p(alpha, beta, gamma_w);
  const fracvar::Grid grid(a, b, n);
  const auto f = sample_expression(f_text, grid);
  const auto df = fracvar::apply_named_operator(op, f, p);
  std::cout << "x,f,Df\n";
  for (std::size_t k = 0; k < grid.size(); ++k)
    std::cout << fmt(grid.node(k)) << "," << fmt(f[k]) << "," << fmt(df[k])
              << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& config_path, const std::string& out_flag) {
  const fracvar::ProblemConfig cfg = fracvar::load_problem_config(config_path);
  const auto dir = output_dir(out_flag);
  const fracvar::SolveReport rep = dispatch_solve(cfg.problem);
  write_trajectory_csv(dir / "trajectory.csv", cfg.problem, rep.trajectory);
  std::ofstream out(dir / "report.json", std::ios::binary);
  out << report_json(rep).dump(2) << "\n";
  if (!rep.converged) {
    std::cerr << "solve did not converge: " << rep.diagnostic << "\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_check_ibp(const std::string& f_text, const std::string& g_text,
                  double a, double b, double alpha,
                  std::optional<double> beta_opt, double gamma_w,
                  const std::vector<std::size_t>& grids) {
  const double beta = beta_opt.value_or(alpha);
  const fracvar::FracParams p(alpha, beta, gamma_w);
  std::cout << "n,residual\n";
  for (std::size_t n : grids) {
    const fracvar::Grid grid(a, b, n);
    const double r = fracvar::ibp_residual_combined(
        sample_expression(f_text, grid), sample_expression(g_text, grid), p);
    std::cout << n << "," << fmt(r) << "\n";
  }
  return kExitOk;
}

int cmd_verify(double corrupt_delta) {
  if (corrupt_delta != 0.0) fracvar::testing::corrupt_gamma(corrupt_delta);
  const auto cases = fracvar::oracle::run_verify_suite();
  bool all = true;
  for (const auto& c : cases) {
    all &= c.passed;
    std::cout << (c.passed ? "PASS" : "FAIL") << "  " << c.name
              << "  (observed " << fmt(c.observed) << ", tolerance "
              << fmt(c.tolerance) << ")\n";
  }
  std::cout << (all ? "verify: all checks passed\n"
                    : "verify: some checks FAILED\n");
  return all ? kExitOk : kExitNotConverged;
}

int cmd_converge(const std::string& config_path, const std::string& out_flag,
                 const std::vector<std::size_t>& grids) {
  const fracvar::ProblemConfig base = fracvar::load_problem_config(config_path);
  if (!base.oracle)
    throw fracvar::ConfigError("oracle",
                               "convergence study needs an oracle entry");
  const auto dir = output_dir(out_flag);

  std::string csv = "n,cost,el_residual_max,error_vs_oracle,order\n";
  bool all_converged = true;
  double prev_err = 0.0;
  std::size_t prev_n = 0;
  for (std::size_t n : grids) {
    const fracvar::ProblemConfig cfg = fracvar::with_grid_size(base, n);
    const fracvar::SolveReport rep = dispatch_solve(cfg.problem);
    all_converged &= rep.converged;
    const fracvar::Trajectory ref =
        fracvar::sample_oracle(cfg, cfg.problem.grid);
    const double err = rep.trajectory.max_node_distance(ref);
    std::string order;
    if (prev_n != 0 && err > 0.0 && prev_err > 0.0)
      order = fmt(std::log2(prev_err / err) /
                  std::log2(double(n - 1) / double(prev_n - 1)));
    csv += std::to_string(n) + "," + fmt(rep.cost) + "," +
           fmt(rep.el_residual_max) + "," + fmt(err) + "," + order + "\n";
    prev_err = err;
    prev_n = n;
  }
  std::ofstream out(dir / "study.csv", std::ios::binary);
  out << csv;
  std::cout << csv;
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional variational calculus toolkit"};
  app.require_subcommand(1);

  std::string op, f_text, g_text = "1", config_path, out_flag;
  double a = 0.0, b = 1.0, alpha = 0.5, gamma_w = 0.5, corrupt_delta = 0.0;
  std::optional<double> beta_opt;
  std::size_t n = 101;
  std::vector<std::size_t> grids;

  auto* deriv = app.add_subcommand("deriv", "Apply an operator to f(x)");
  deriv->add_option("--op", op, "Operator name")->required();
  deriv->add_option("--f", f_text, "Expression of x")->required();
  deriv->add_option("--a", a, "Left endpoint");
  deriv->add_option("--b", b, "Right endpoint");
  deriv->add_option("--n", n, "Grid nodes");
  deriv->add_option("--alpha", alpha, "Left order");
  deriv->add_option("--beta", beta_opt, "Right order (defaults to alpha)");
  deriv->add_option("--gamma", gamma_w, "Combination weight");

  auto* solve = app.add_subcommand("solve", "Solve a problem config");
  solve->add_option("config", config_path, "JSON problem file")->required();
  solve->add_option("-o,--output-dir", out_flag,
                    "Output directory (default: FRACVAR_OUTPUT_DIR or .)");

  auto* ibp = app.add_subcommand("check-ibp",
                                 "Integration-by-parts residual study");
  ibp->add_option("--f", f_text, "Expression of x")->required();
  ibp->add_option("--g", g_text, "Expression of x");
  ibp->add_option("--a", a, "Left endpoint");
  ibp->add_option("--b", b, "Right endpoint");
  ibp->add_option("--alpha", alpha, "Left order");
  ibp->add_option("--beta", beta_opt, "Right order (defaults to alpha)");
  ibp->add_option("--gamma", gamma_w, "Combination weight");
  ibp->add_option("--grids", grids, "Grid sizes")->required();

  auto* verify = app.add_subcommand("verify", "Run the built-in self-checks");
  verify
      ->add_option("--corrupt-gamma", corrupt_delta,
                   "Fault-injection: perturb the Gamma tables")
      ->group("");  // hidden; for testing the self-checks themselves

  auto* conv = app.add_subcommand("converge", "Grid-refinement study");
  conv->add_option("config", config_path, "JSON problem file")->required();
  conv->add_option("--grids", grids, "Grid sizes")->required();
  conv->add_option("-o,--output-dir", out_flag,
                   "Output directory (default: FRACVAR_OUTPUT_DIR or .)");

  try {
    app.parse(argc, argv);
    if (deriv->parsed())
      return cmd_deriv(op, f_text, a, b, n, alpha, beta_opt, gamma_w);
    if (solve->parsed()) return cmd_solve(config_path, out_flag);
    if (ibp->parsed())
      return cmd_check_ibp(f_text, g_text, a, b, alpha, beta_opt, gamma_w,
                           grids);
    if (verify->parsed()) return cmd_verify(corrupt_delta);
    if (conv->parsed()) return cmd_converge(config_path, out_flag, grids);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
