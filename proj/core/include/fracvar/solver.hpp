#pragma once

#include "fracvar/problem.hpp"
#include "fracvar/variational.hpp"

namespace fracvar {

/// Direct method for the fixed-boundary problem: minimizes the discretized
/// functional over interior node values with an L-BFGS iteration and
/// backtracking line search. Non-convergence is reported, not thrown.
SolveReport solve_basic(const Problem& prob);

/// Free or upper-bounded right endpoints: the free right-end values join the
/// decision variables. Bounded components are solved free first; a violated
/// bound is pinned and the transversality sign condition certified.
SolveReport solve_free_endpoint(const Problem& prob);

/// Equality isoperimetric constraints: outer Newton iteration on the
/// multipliers with inner solves of the augmented functional L - sum l_j G^j.
SolveReport solve_isoperimetric(const Problem& prob);

/// Inequality (<=) constraints by an outer active-set loop around the
/// equality machinery. Never-activated constraints keep multiplier 0 exactly.
SolveReport solve_isoperimetric_ineq(const Problem& prob);

/// Determinant of the r x r matrix of constraint first variations
/// dG^i(y; h^j). A near-zero scale-normalized magnitude signals the
/// abnormal (degenerate multiplier) case.
double check_regularity(const Problem& prob, const Trajectory& y,
                        const std::vector<VariationProbe>& probes);

/// Deterministic probe directions used for regularity checks and
/// certificates: sinusoidal bumps cycling over components.
std::vector<VariationProbe> standard_probes(const Problem& prob,
                                            std::size_t count);

/// Linear interpolation between the fixed boundary values (zero in place of
/// a free right endpoint).
Trajectory initial_trajectory(const Problem& prob);

/// Analytic gradient of the discretized functional over the interior node
/// values (component-major packing, boundaries held fixed):
///   dJ/dy_i(x_k) = w_k dL/dy_i(x_k) + (M^T (w .* dL/dv_i))(k).
/// Exposed so the gradient can be validated against finite differences.
std::vector<double> functional_gradient(const Problem& prob,
                                        const Trajectory& y);

}  // namespace fracvar
