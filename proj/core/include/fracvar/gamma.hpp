#pragma once

namespace fracvar {

/// Gamma function for positive real arguments, Lanczos approximation
/// (g = 7, 9 coefficients). Relative error below 1e-13 on (0, 50].
/// Throws std::domain_error for z <= 0.
double gamma(double z);

/// log Gamma, same domain. Used to form Gamma ratios without overflow.
double log_gamma(double z);

/// Ratio Gamma(p) / Gamma(q) for p, q > 0, formed in log space.
double gamma_ratio(double p, double q);

namespace testing {
// Fault-injection hook for the self-check suite: perturbs the leading
// Lanczos coefficient by delta. Reset with delta = 0.
void corrupt_gamma(double delta);
}  // namespace testing

}  // namespace fracvar
