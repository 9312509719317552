#pragma once

#include <string>
#include <vector>

#include "fracvar/problem.hpp"

namespace fracvar {
namespace oracle {

// Closed-form reference values used as ground truth by the tests and by the
// "verify" self-check: power rules of the fractional operators, classical
// limit solutions, and an independent first-variation estimator.

enum class Anchor { Left, Right };
enum class PowerKind { Rlfi, Cfd, Rlfd };

/// Action of an operator on (x-a)^p (left) or (b-x)^p (right):
/// a Gamma-ratio coefficient times a shifted power.
struct PowerRuleCase {
  Anchor anchor;
  PowerKind kind;
  double order;
  double exponent;

  PowerRuleCase(Anchor anchor, PowerKind kind, double order, double exponent);

  double coefficient() const;      // Gamma(p+1)/Gamma(p+1 +- order)
  double result_exponent() const;  // p + order (Rlfi) or p - order
};

/// coefficient * (x-a)^q or coefficient * (b-x)^q.
double power_reference(const PowerRuleCase& c, double x, double a, double b);

/// Sampled continuum solutions of the classical-limit test problems.
/// Tags: "line" (Dirichlet v^2 problem, boundary values y0 -> y1),
/// "area_constrained" (v^2 with int y = c on [0,1], zero boundaries),
/// "free_end_constant" (v^2 with free right end, y == y0).
Trajectory classical_limit_solution(const std::string& tag, const Grid& grid,
                                    double y0 = 0.0, double y1 = 1.0,
                                    double c = 1.0);

/// Independent central-difference estimate of the first variation on the
/// fixed schedule eps in {1e-3, 1e-4, 1e-5} with Richardson extrapolation.
/// Cross-checks first_variation without sharing its implementation.
double brute_force_first_variation(const Problem& prob, const Trajectory& y,
                                   const Trajectory& h);

/// One self-check case of the verify suite.
struct VerifyCase {
  std::string name;
  bool passed;
  double observed;
  double tolerance;
};

/// Runs the built-in oracle suite: Gamma identities, power rules for every
/// operator, classical-limit solves and the first-variation cross-check.
std::vector<VerifyCase> run_verify_suite();

}  // namespace oracle
}  // namespace fracvar
