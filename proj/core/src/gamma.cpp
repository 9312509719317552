#include "fracvar/gamma.hpp"

#include <cmath>
#include <stdexcept>

namespace fracvar {

namespace {

constexpr int kG = 7;
constexpr double kSqrtTwoPi = 2.5066282746310005024;

// Lanczos coefficients for g = 7, n = 9 (Godfrey / Pugh).
const double kCoef[kG + 2] = {
    0.99999999999980993,   676.5203681218851,    -1259.1392167224028,
    771.32342877765313,    -176.61502916214059,  12.507343278686905,
    -0.13857109526572012,  9.9843695780195716e-6, 1.5056327351493116e-7};

double g_fault_delta = 0.0;

double lanczos_sum(double z) {
  // z already shifted so the series is evaluated at z-1.
  double x = kCoef[0] + g_fault_delta;
  for (int i = 1; i < kG + 2; ++i) x += kCoef[i] / (z + i - 1.0);
  return x;
}

}  // namespace

double gamma(double z) {
  if (!(z > 0.0)) throw std::domain_error("gamma: argument must be positive");
  if (z < 0.5) {
    // reflection keeps the series argument away from the poles
    return M_PI / (std::sin(M_PI * z) * gamma(1.0 - z));
  }
  const double x = lanczos_sum(z);
  const double t = z - 1.0 + kG + 0.5;
  return kSqrtTwoPi * std::pow(t, z - 0.5) * std::exp(-t) * x;
}

double log_gamma(double z) {
  if (!(z > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
  if (z < 0.5)
    return std::log(M_PI / std::sin(M_PI * z)) - log_gamma(1.0 - z);
  const double x = lanczos_sum(z);
  const double t = z - 1.0 + kG + 0.5;
  return std::log(kSqrtTwoPi * x) + (z - 0.5) * std::log(t) - t;
}

double gamma_ratio(double p, double q) {
  return std::exp(log_gamma(p) - log_gamma(q));
}

namespace testing {
void corrupt_gamma(double delta) { g_fault_delta = delta; }
}  // namespace testing

}  // namespace fracvar
