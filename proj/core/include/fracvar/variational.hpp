#pragma once

#include <vector>

#include "fracvar/problem.hpp"

namespace fracvar {

/// max_x ||y(x)|| + max_x ||D y(x)|| with the Euclidean norm on R^N; the
/// combined operator is applied componentwise.
double norm_1_inf(const Trajectory& y, const FracParams& p);

/// Trapezoid integral of L(x_k, y(x_k), (D y)(x_k)) over the grid.
/// Expression errors carry the offending node index.
double evaluate_functional(const Problem& prob, const Trajectory& y);

/// Same quadrature for an arbitrary integrand (used by constraints).
double evaluate_integral(const Problem& prob, const ExprAst& integrand,
                         const Trajectory& y);

/// Central-difference estimate of d/de J(y + e h) at e = 0, Richardson
/// extrapolated over the probe's epsilon schedule (at least 2 values).
/// The probe direction must vanish at fixed boundaries and be nonzero.
double first_variation(const Problem& prob, const Trajectory& y,
                       const VariationProbe& probe);

/// First variation of int integrand[y] dx (constraint functionals).
double first_variation_of(const Problem& prob, const ExprAst& integrand,
                          const Trajectory& y, const VariationProbe& probe);

/// Checks a probe direction against the problem's fixed boundaries.
bool probe_admissible(const Problem& prob, const Trajectory& h);

/// Euler-Lagrange residual per component:
///   R_i(x) = dL/dy_i [y](x) + (dual RL operator applied to dL/dv_i along y).
std::vector<SampledFunction> el_residual(const Problem& prob,
                                         const Trajectory& y);

/// Nodes excluded at each end of the residual window: 1% of the interval,
/// at least 2 nodes. The RL derivative values near the anchors are
/// low-accuracy and the layer has a fixed physical width as the orders
/// approach 1.
std::size_t el_residual_margin(std::size_t n);

/// Max |R_i| over the interior window (el_residual_margin nodes excluded at
/// each end).
double el_residual_interior_max(const std::vector<SampledFunction>& residual);

/// Transversality residual of component l (free or bounded right end):
///   T_l = gamma (I_right^{1-alpha} c)(b) - (1-gamma) (I_left^{1-beta} c)(b),
/// c = dL/dv_l along y. The right integral's value at b is extrapolated
/// from the two nearest nodes where it is defined.
double transversality_residual(const Problem& prob, const Trajectory& y,
                               std::size_t l);

/// Combined-operator samples v_i = (D y_i)(x_k) for every component.
std::vector<SampledFunction> operator_values(const Problem& prob,
                                             const Trajectory& y);

/// dL/dy_i and dL/dv_i sampled along y.
struct LagrangianPartials {
  std::vector<std::vector<double>> dy;  // dims x n
  std::vector<std::vector<double>> dv;  // dims x n
};
LagrangianPartials lagrangian_partials(const Problem& prob, const Trajectory& y);

}  // namespace fracvar
