#include "fracvar/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracvar/gamma.hpp"

namespace fracvar {

namespace {

std::vector<double> reversed(const std::vector<double>& v) {
  return {v.rbegin(), v.rend()};
}

SampledFunction reflect(const SampledFunction& f) {
  return SampledFunction(f.grid, reversed(f.values));
}

void require_same_grid(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid == g.grid))
    throw std::invalid_argument("operands sampled on different grids");
}

// L1 kernel differences b_m = m^{1-a} - (m-1)^{1-a}, m = 1..n-1.
std::vector<double> l1_differences(std::size_t n, double alpha) {
  std::vector<double> b(n);
  const double e = 1.0 - alpha;
  b[0] = 0.0;
  for (std::size_t m = 1; m < n; ++m)
    b[m] = std::pow(double(m), e) - std::pow(double(m - 1), e);
  return b;
}

// Product-trapezoid weights for the left RLFI at target node k (k >= 1):
// I_k = h^a / Gamma(a+2) * sum_j c(k,j) f_j, with the kernel moments of
// (x_k - t)^{a-1} integrated exactly against the piecewise-linear f.
struct RlfiWeights {
  double scale;                 // h^a / Gamma(a+2)
  std::vector<double> powers;   // m^{a+1} for m = 0..n-1
  double alpha;

  RlfiWeights(const Grid& g, double a)
      : scale(std::pow(g.spacing(), a) / gamma(a + 2.0)),
        powers(g.size()),
        alpha(a) {
    for (std::size_t m = 0; m < g.size(); ++m)
      powers[m] = std::pow(double(m), a + 1.0);
  }

  double first(std::size_t k) const {  // weight of f_0
    const double kd = double(k);
    return powers[k - 1] - (kd - 1.0 - alpha) * std::pow(kd, alpha);
  }
  double interior(std::size_t k, std::size_t j) const {  // 1 <= j <= k-1
    const std::size_t m = k - j;
    return powers[m + 1] + powers[m - 1] - 2.0 * powers[m];
  }
};

SampledFunction rlfi_left_impl(const SampledFunction& f, double alpha) {
  const std::size_t n = f.grid.size();
  RlfiWeights w(f.grid, alpha);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double s = w.first(k) * f.values[0] + f.values[k];
    for (std::size_t j = 1; j < k; ++j) s += w.interior(k, j) * f.values[j];
    out[k] = w.scale * s;
  }
  return SampledFunction(f.grid, std::move(out));
}

SampledFunction cfd_left_impl(const SampledFunction& f, double alpha) {
  const std::size_t n = f.grid.size();
  const double c = std::pow(f.grid.spacing(), -alpha) / gamma(2.0 - alpha);
  const std::vector<double> b = l1_differences(n, alpha);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      s += b[k - j] * (f.values[j + 1] - f.values[j]);
    out[k] = c * s;
  }
  return SampledFunction(f.grid, std::move(out));
}

// Differentiates samples g on a uniform grid: central differences interior,
// second-order one-sided at the far end, and the anchored endpoint (index 0
// here) extrapolated linearly from the two nearest interior values.
std::vector<double> differentiate_left_anchored(const Grid& grid,
                                                const std::vector<double>& g) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::vector<double> d(n);
  for (std::size_t k = 1; k + 1 < n; ++k)
    d[k] = (g[k + 1] - g[k - 1]) / (2.0 * h);
  d[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h);
  d[0] = 2.0 * d[1] - d[2];
  return d;
}

Matrix reflect_matrix(const Matrix& m) {
  const std::size_t n = m.rows();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = m(n - 1 - i, n - 1 - j);
  return out;
}

Matrix rlfi_left_matrix(const Grid& grid, double alpha) {
  const std::size_t n = grid.size();
  RlfiWeights w(grid, alpha);
  Matrix m(n, n);
  for (std::size_t k = 1; k < n; ++k) {
    m(k, 0) = w.scale * w.first(k);
    for (std::size_t j = 1; j < k; ++j) m(k, j) = w.scale * w.interior(k, j);
    m(k, k) = w.scale;
  }
  return m;
}

Matrix cfd_left_matrix(const Grid& grid, double alpha) {
  const std::size_t n = grid.size();
  const double c = std::pow(grid.spacing(), -alpha) / gamma(2.0 - alpha);
  const std::vector<double> b = l1_differences(n, alpha);
  Matrix m(n, n);
  for (std::size_t k = 1; k < n; ++k) {
    m(k, 0) = -c * b[k];
    for (std::size_t j = 1; j < k; ++j) m(k, j) = c * (b[k - j + 1] - b[k - j]);
    m(k, k) = c;  // b[1] == 1
  }
  return m;
}

Matrix rlfd_left_matrix(const Grid& grid, double alpha) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const Matrix r = rlfi_left_matrix(grid, 1.0 - alpha);
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 1; k + 1 < n; ++k)
      m(k, j) = (r(k + 1, j) - r(k - 1, j)) / (2.0 * h);
    m(n - 1, j) =
        (3.0 * r(n - 1, j) - 4.0 * r(n - 2, j) + r(n - 3, j)) / (2.0 * h);
    m(0, j) = 2.0 * m(1, j) - m(2, j);
  }
  return m;
}

Matrix add_scaled(const Matrix& a, double ca, const Matrix& b, double cb) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      out(i, j) = ca * a(i, j) + cb * b(i, j);
  return out;
}

}  // namespace

FracParams::FracParams(double alpha, double beta, double gamma)
    : alpha(alpha), beta(beta), gamma(gamma) {
  require_order(alpha, "alpha");
  require_order(beta, "beta");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::domain_error("FracParams: gamma must lie in [0,1]");
}

void require_order(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in (0,1)");
  }
}

std::vector<double> Matrix::apply(const std::vector<double>& v) const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    const double* row = data_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) s += row[j] * v[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> Matrix::apply_transpose(const std::vector<double>& v) const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* row = data_.data() + i * cols_;
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (std::size_t j = 0; j < cols_; ++j) out[j] += row[j] * vi;
  }
  return out;
}

SampledFunction DiscreteOperator::apply(const SampledFunction& f) const {
  if (!(f.grid == grid))
    throw std::invalid_argument("DiscreteOperator: grid mismatch");
  return SampledFunction(grid, matrix.apply(f.values));
}

SampledFunction rlfi_left(const SampledFunction& f, double alpha) {
  require_order(alpha);
  return rlfi_left_impl(f, alpha);
}

SampledFunction rlfi_right(const SampledFunction& f, double alpha) {
  require_order(alpha);
  return reflect(rlfi_left_impl(reflect(f), alpha));
}

SampledFunction cfd_left(const SampledFunction& f, double alpha) {
  require_order(alpha);
  return cfd_left_impl(f, alpha);
}

SampledFunction cfd_right(const SampledFunction& f, double alpha) {
  require_order(alpha);
  return reflect(cfd_left_impl(reflect(f), alpha));
}

SampledFunction rlfd_left(const SampledFunction& f, double alpha) {
  require_order(alpha);
  const SampledFunction g = rlfi_left_impl(f, 1.0 - alpha);
  return SampledFunction(f.grid, differentiate_left_anchored(f.grid, g.values));
}

SampledFunction rlfd_right(const SampledFunction& f, double alpha) {
  require_order(alpha);
  return reflect(rlfd_left(reflect(f), alpha));
}

SampledFunction combined_caputo(const SampledFunction& f, const FracParams& p) {
  if (p.gamma == 1.0) return cfd_left(f, p.alpha);
  if (p.gamma == 0.0) return cfd_right(f, p.beta);
  const SampledFunction l = cfd_left(f, p.alpha);
  const SampledFunction r = cfd_right(f, p.beta);
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    out[k] = p.gamma * l.values[k] + (1.0 - p.gamma) * r.values[k];
  return SampledFunction(f.grid, std::move(out));
}

SampledFunction dual_rl(const SampledFunction& f, const FracParams& p) {
  if (p.gamma == 0.0) return rlfd_left(f, p.beta);
  if (p.gamma == 1.0) return rlfd_right(f, p.alpha);
  const SampledFunction l = rlfd_left(f, p.beta);
  const SampledFunction r = rlfd_right(f, p.alpha);
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    out[k] = (1.0 - p.gamma) * l.values[k] + p.gamma * r.values[k];
  return SampledFunction(f.grid, std::move(out));
}

DiscreteOperator build_operator_matrix(OperatorKind kind, const Grid& grid,
                                       const FracParams& params) {
  Matrix m;
  switch (kind) {
    case OperatorKind::RlfiLeft:
      m = rlfi_left_matrix(grid, params.alpha);
      break;
    case OperatorKind::RlfiRight:
      m = reflect_matrix(rlfi_left_matrix(grid, params.alpha));
      break;
    case OperatorKind::CfdLeft:
      m = cfd_left_matrix(grid, params.alpha);
      break;
    case OperatorKind::CfdRight:
      m = reflect_matrix(cfd_left_matrix(grid, params.alpha));
      break;
    case OperatorKind::RlfdLeft:
      m = rlfd_left_matrix(grid, params.alpha);
      break;
    case OperatorKind::RlfdRight:
      m = reflect_matrix(rlfd_left_matrix(grid, params.alpha));
      break;
    case OperatorKind::CombinedCaputo:
      if (params.gamma == 1.0) {
        m = cfd_left_matrix(grid, params.alpha);
      } else if (params.gamma == 0.0) {
        m = reflect_matrix(cfd_left_matrix(grid, params.beta));
      } else {
        m = add_scaled(cfd_left_matrix(grid, params.alpha), params.gamma,
                       reflect_matrix(cfd_left_matrix(grid, params.beta)),
                       1.0 - params.gamma);
      }
      break;
    case OperatorKind::DualRl:
      if (params.gamma == 0.0) {
        m = rlfd_left_matrix(grid, params.beta);
      } else if (params.gamma == 1.0) {
        m = reflect_matrix(rlfd_left_matrix(grid, params.alpha));
      } else {
        m = add_scaled(rlfd_left_matrix(grid, params.beta), 1.0 - params.gamma,
                       reflect_matrix(rlfd_left_matrix(grid, params.alpha)),
                       params.gamma);
      }
      break;
    default:
      throw std::invalid_argument("build_operator_matrix: unknown kind");
  }
  return DiscreteOperator{kind, grid, params, std::move(m)};
}

double ibp_residual_combined(const SampledFunction& f, const SampledFunction& g,
                             const FracParams& p) {
  require_same_grid(f, g);
  const std::size_t n = f.size();
  const SampledFunction df = combined_caputo(f, p);
  std::vector<double> lhs_vals(n);
  for (std::size_t k = 0; k < n; ++k) lhs_vals[k] = g.values[k] * df.values[k];
  const double lhs = trapezoid(f.grid, lhs_vals);

  const SampledFunction ir = rlfi_right(g, 1.0 - p.alpha);
  const SampledFunction il = rlfi_left(g, 1.0 - p.beta);
  const double boundary =
      p.gamma * (f.values[n - 1] * ir.values[n - 1] - f.values[0] * ir.values[0]) +
      (1.0 - p.gamma) *
          (-(f.values[n - 1] * il.values[n - 1]) + f.values[0] * il.values[0]);

  const SampledFunction dg = dual_rl(g, p);
  std::vector<double> rhs_vals(n);
  for (std::size_t k = 0; k < n; ++k) rhs_vals[k] = f.values[k] * dg.values[k];
  const double rhs = boundary + trapezoid(f.grid, rhs_vals);

  return std::abs(lhs - rhs);
}

double ibp_residual_rlfi(const SampledFunction& f, const SampledFunction& g,
                         double alpha) {
  require_same_grid(f, g);
  require_order(alpha);
  const std::size_t n = f.size();
  const SampledFunction lf = rlfi_left(f, alpha);
  const SampledFunction rg = rlfi_right(g, alpha);
  std::vector<double> a_vals(n), b_vals(n);
  for (std::size_t k = 0; k < n; ++k) {
    a_vals[k] = g.values[k] * lf.values[k];
    b_vals[k] = f.values[k] * rg.values[k];
  }
  return std::abs(trapezoid(f.grid, a_vals) - trapezoid(f.grid, b_vals));
}

}  // namespace fracvar
