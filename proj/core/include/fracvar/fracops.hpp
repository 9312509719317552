#pragma once

#include <cstddef>
#include <vector>

#include "fracvar/grid.hpp"

namespace fracvar {

/// Orders and convex weight of the two-sided Caputo combination:
/// gamma * (left Caputo, order alpha) + (1-gamma) * (right Caputo, order beta).
struct FracParams {
  double alpha;
  double beta;
  double gamma;

  FracParams(double alpha, double beta, double gamma);
};

/// Checks a single fractional order, throws std::domain_error outside (0,1).
void require_order(double alpha, const char* what = "order");

enum class OperatorKind {
  RlfiLeft,
  RlfiRight,
  RlfdLeft,
  RlfdRight,
  CfdLeft,
  CfdRight,
  CombinedCaputo,
  DualRl,
};

/// Minimal dense row-major matrix, just enough for operator realizations
/// and the solver's gradient assembly.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<double> apply(const std::vector<double>& v) const;
  std::vector<double> apply_transpose(const std::vector<double>& v) const;

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

/// Dense realization of a fractional operator on a grid:
/// (op f)(x_k) = sum_j M(k,j) f(x_j).
struct DiscreteOperator {
  OperatorKind kind;
  Grid grid;
  FracParams params;  // one-sided kinds read only the relevant order
  Matrix matrix;

  SampledFunction apply(const SampledFunction& f) const;
};

// Fractional integrals. Product-trapezoidal quadrature with exact moments
// of the weakly singular kernel; value 0 at the anchored endpoint.
SampledFunction rlfi_left(const SampledFunction& f, double alpha);
SampledFunction rlfi_right(const SampledFunction& f, double alpha);

// Caputo derivatives, L1 scheme. Value 0 at the anchored endpoint.
SampledFunction cfd_left(const SampledFunction& f, double alpha);
SampledFunction cfd_right(const SampledFunction& f, double alpha);

// Riemann-Liouville derivatives: finite difference of the (1-alpha)-order
// integral. Central differences interior; the anchored endpoint value is
// linearly extrapolated from the two nearest interior nodes (the kernel is
// singular there when f does not vanish at the anchor), the opposite
// endpoint uses a one-sided difference. Endpoint values are low-accuracy.
SampledFunction rlfd_left(const SampledFunction& f, double alpha);
SampledFunction rlfd_right(const SampledFunction& f, double alpha);

/// gamma * cfd_left(f, alpha) + (1-gamma) * cfd_right(f, beta).
/// The gamma = 0 / 1 cases return the one-sided result bitwise.
SampledFunction combined_caputo(const SampledFunction& f, const FracParams& p);

/// (1-gamma) * rlfd_left(f, beta) + gamma * rlfd_right(f, alpha): the
/// operator produced by integration by parts (sides, orders and weight all
/// swapped relative to combined_caputo).
SampledFunction dual_rl(const SampledFunction& f, const FracParams& p);

/// Dense matrix realization; rows reproduce the apply operations above to
/// relative 1e-12.
DiscreteOperator build_operator_matrix(OperatorKind kind, const Grid& grid,
                                       const FracParams& params);

/// |LHS - RHS| of the integration-by-parts rule for the combined operator:
/// LHS  = int g * (D^{a,b}_g f),
/// RHS  = gamma [f * I_right^{1-alpha} g]_a^b
///      + (1-gamma) [-f * I_left^{1-beta} g]_a^b + int f * (dual g).
double ibp_residual_combined(const SampledFunction& f, const SampledFunction& g,
                             const FracParams& p);

/// |int g * (I_left^alpha f) - int f * (I_right^alpha g)|.
double ibp_residual_rlfi(const SampledFunction& f, const SampledFunction& g,
                         double alpha);

}  // namespace fracvar
