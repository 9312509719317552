#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracvar/expr.hpp"
#include "fracvar/fracops.hpp"
#include "fracvar/trajectory.hpp"

namespace fracvar {

enum class RightBoundaryKind { Fixed, Free, UpperBounded };

/// Per-component boundary data. The left end is always fixed.
struct BoundaryCondition {
  double left = 0.0;
  RightBoundaryKind right_kind = RightBoundaryKind::Fixed;
  double right = 0.0;  // fixed value or upper bound; ignored when Free
};

enum class ConstraintRelation { Equality, InequalityLe };

/// Integral constraint int G[y] dx (= | <=) target.
struct Constraint {
  ExprAst integrand;
  ConstraintRelation relation = ConstraintRelation::Equality;
  double target = 0.0;
};

struct SolverOptions {
  double tol_g = 1e-8;        // gradient max-norm
  double tol_r_scale = 5e-2;  // EL residual, times max(1, scale of dL/dy)
  double tol_v = 1e-5;        // first-variation certificate
  double tol_c = 1e-8;        // constraint residual
  double tol_cs = 1e-6;       // complementary slackness
  double tol_t = 5e-2;        // transversality residual
  double tol_reg = 1e-8;      // normalized regularity determinant
  std::size_t max_iter = 20000;
  std::size_t outer_max_iter = 40;
  std::size_t lbfgs_memory = 25;
};

/// A fully specified variational problem on a grid.
struct Problem {
  FracParams params;
  Grid grid;
  std::size_t dims = 1;
  ExprAst lagrangian;
  std::map<std::string, double> parameters;
  // Parameters bound per node (e.g. a manufactured forcing term sampled on
  // the grid). Treated as constants by the symbolic partials.
  std::map<std::string, SampledFunction> grid_parameters;
  std::vector<BoundaryCondition> boundary;
  std::vector<Constraint> constraints;
  SolverOptions options;

  void validate() const;  // throws std::invalid_argument on shape errors
};

struct SolveReport {
  Trajectory trajectory;
  double cost = 0.0;
  double el_residual_max = 0.0;
  // component index -> transversality residual, for free/bounded components
  std::map<std::size_t, double> transversality_residuals;
  std::vector<double> multipliers;
  std::vector<double> constraint_residuals;
  std::vector<double> complementary_slackness;
  std::vector<bool> bound_active;  // free-endpoint solves: active right bounds
  std::size_t iterations = 0;
  bool converged = false;
  bool abnormal = false;  // regularity (normality) condition failed
  double gradient_norm = 0.0;
  std::string diagnostic;
};

/// Direction for first-variation probes, with the finite-difference epsilon
/// schedule (largest first).
struct VariationProbe {
  Trajectory direction;
  std::vector<double> epsilons{1e-3, 1e-4, 1e-5};
};

}  // namespace fracvar
