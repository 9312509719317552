#include "fracvar/variational.hpp"

#include <cmath>
#include <stdexcept>

namespace fracvar {

namespace {

Bindings node_bindings(const Problem& prob, std::size_t k) {
  Bindings b;
  b.x = prob.grid.node(k);
  b.y.resize(prob.dims);
  b.v.resize(prob.dims);
  b.params = prob.parameters;
  for (const auto& [name, sf] : prob.grid_parameters) b.params[name] = sf[k];
  return b;
}

void fill_state(Bindings& b, const Trajectory& y,
                const std::vector<SampledFunction>& v, std::size_t k) {
  for (std::size_t i = 0; i < y.dims(); ++i) {
    b.y[i] = y.values[i][k];
    b.v[i] = v[i][k];
  }
}

double eval_at_node(const ExprAst& e, const Bindings& b, std::size_t k) {
  try {
    return eval(e, b);
  } catch (const EvalError& err) {
    throw EvalError(std::string(err.what()) + " (at node " + std::to_string(k) +
                    ")");
  }
}

Trajectory perturbed(const Trajectory& y, const Trajectory& h, double eps) {
  Trajectory out = y;
  for (std::size_t i = 0; i < y.dims(); ++i)
    for (std::size_t k = 0; k < y.nodes(); ++k)
      out.values[i][k] += eps * h.values[i][k];
  return out;
}

// Central-difference slope of e -> J(y + e h), Richardson extrapolated over
// the schedule assuming an even-power error expansion.
double richardson_slope(const std::vector<double>& eps,
                        const std::vector<double>& slopes) {
  const std::size_t m = eps.size();
  std::vector<std::vector<double>> t(m);
  for (std::size_t i = 0; i < m; ++i) {
    t[i].resize(i + 1);
    t[i][0] = slopes[i];
    for (std::size_t j = 1; j <= i; ++j) {
      const double ratio = eps[i - j] / eps[i];
      const double denom = std::pow(ratio, 2.0 * double(j)) - 1.0;
      t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) / denom;
    }
  }
  return t[m - 1][m - 1];
}

double first_variation_impl(const Problem& prob, const ExprAst& integrand,
                            const Trajectory& y, const VariationProbe& probe) {
  if (probe.epsilons.size() < 2)
    throw std::invalid_argument(
        "first_variation: epsilon schedule needs at least 2 values");
  if (!probe_admissible(prob, probe.direction))
    throw std::invalid_argument("first_variation: inadmissible probe direction");
  std::vector<double> slopes;
  slopes.reserve(probe.epsilons.size());
  for (double eps : probe.epsilons) {
    const double jp =
        evaluate_integral(prob, integrand, perturbed(y, probe.direction, eps));
    const double jm =
        evaluate_integral(prob, integrand, perturbed(y, probe.direction, -eps));
    slopes.push_back((jp - jm) / (2.0 * eps));
  }
  return richardson_slope(probe.epsilons, slopes);
}

}  // namespace

void Problem::validate() const {
  if (dims < 1) throw std::invalid_argument("Problem: dims must be >= 1");
  if (lagrangian.dims != dims)
    throw std::invalid_argument("Problem: lagrangian dimension != dims");
  if (boundary.size() != dims)
    throw std::invalid_argument("Problem: boundary spec count != dims");
  for (const auto& c : constraints)
    if (c.integrand.dims != dims)
      throw std::invalid_argument("Problem: constraint dimension != dims");
  for (const auto& [name, sf] : grid_parameters)
    if (!(sf.grid == grid))
      throw std::invalid_argument("Problem: grid parameter '" + name +
                                  "' sampled on a different grid");
}

std::vector<SampledFunction> operator_values(const Problem& prob,
                                             const Trajectory& y) {
  std::vector<SampledFunction> v;
  v.reserve(prob.dims);
  for (std::size_t i = 0; i < prob.dims; ++i)
    v.push_back(combined_caputo(y.component(i), prob.params));
  return v;
}

double norm_1_inf(const Trajectory& y, const FracParams& p) {
  std::vector<SampledFunction> v;
  v.reserve(y.dims());
  for (std::size_t i = 0; i < y.dims(); ++i)
    v.push_back(combined_caputo(y.component(i), p));
  double max_y = 0.0, max_v = 0.0;
  for (std::size_t k = 0; k < y.nodes(); ++k) {
    double sy = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < y.dims(); ++i) {
      sy += y.values[i][k] * y.values[i][k];
      sv += v[i][k] * v[i][k];
    }
    max_y = std::max(max_y, sy);
    max_v = std::max(max_v, sv);
  }
  return std::sqrt(max_y) + std::sqrt(max_v);
}

double evaluate_integral(const Problem& prob, const ExprAst& integrand,
                         const Trajectory& y) {
  if (y.dims() != prob.dims)
    throw std::invalid_argument("evaluate_integral: trajectory dims mismatch");
  const std::vector<SampledFunction> v = operator_values(prob, y);
  const std::size_t n = prob.grid.size();
  std::vector<double> integrand_vals(n);
  Bindings b = node_bindings(prob, 0);
  for (std::size_t k = 0; k < n; ++k) {
    b.x = prob.grid.node(k);
    for (const auto& [name, sf] : prob.grid_parameters) b.params[name] = sf[k];
    fill_state(b, y, v, k);
    integrand_vals[k] = eval_at_node(integrand, b, k);
  }
  return trapezoid(prob.grid, integrand_vals);
}

double evaluate_functional(const Problem& prob, const Trajectory& y) {
  return evaluate_integral(prob, prob.lagrangian, y);
}

bool probe_admissible(const Problem& prob, const Trajectory& h) {
  if (h.dims() != prob.dims || !(h.grid == prob.grid)) return false;
  const std::size_t n = h.nodes();
  bool nonzero = false;
  for (std::size_t i = 0; i < h.dims(); ++i) {
    if (h.values[i][0] != 0.0) return false;  // left ends are always fixed
    if (prob.boundary[i].right_kind == RightBoundaryKind::Fixed &&
        h.values[i][n - 1] != 0.0)
      return false;
    for (double x : h.values[i])
      if (x != 0.0) nonzero = true;
  }
  return nonzero;
}

double first_variation(const Problem& prob, const Trajectory& y,
                       const VariationProbe& probe) {
  return first_variation_impl(prob, prob.lagrangian, y, probe);
}

double first_variation_of(const Problem& prob, const ExprAst& integrand,
                          const Trajectory& y, const VariationProbe& probe) {
  return first_variation_impl(prob, integrand, y, probe);
}

LagrangianPartials lagrangian_partials(const Problem& prob,
                                       const Trajectory& y) {
  const std::size_t n = prob.grid.size();
  LagrangianPartials out;
  out.dy.assign(prob.dims, std::vector<double>(n));
  out.dv.assign(prob.dims, std::vector<double>(n));
  const std::vector<SampledFunction> v = operator_values(prob, y);
  Bindings b = node_bindings(prob, 0);
  for (std::size_t i = 0; i < prob.dims; ++i) {
    const ExprAst dLdy = diff(prob.lagrangian, {VarKind::Y, i + 1});
    const ExprAst dLdv = diff(prob.lagrangian, {VarKind::V, i + 1});
    for (std::size_t k = 0; k < n; ++k) {
      b.x = prob.grid.node(k);
      for (const auto& [name, sf] : prob.grid_parameters) b.params[name] = sf[k];
      fill_state(b, y, v, k);
      out.dy[i][k] = eval_at_node(dLdy, b, k);
      out.dv[i][k] = eval_at_node(dLdv, b, k);
    }
  }
  return out;
}

std::vector<SampledFunction> el_residual(const Problem& prob,
                                         const Trajectory& y) {
  const LagrangianPartials parts = lagrangian_partials(prob, y);
  std::vector<SampledFunction> out;
  out.reserve(prob.dims);
  for (std::size_t i = 0; i < prob.dims; ++i) {
    const SampledFunction costate(prob.grid, parts.dv[i]);
    const SampledFunction dual = dual_rl(costate, prob.params);
    std::vector<double> r(prob.grid.size());
    for (std::size_t k = 0; k < r.size(); ++k)
      r[k] = parts.dy[i][k] + dual[k];
    out.emplace_back(prob.grid, std::move(r));
  }
  return out;
}

std::size_t el_residual_margin(std::size_t n) {
  return std::max<std::size_t>(2, (n - 1) / 100);
}

double el_residual_interior_max(const std::vector<SampledFunction>& residual) {
  double m = 0.0;
  for (const auto& r : residual) {
    const std::size_t n = r.size();
    const std::size_t w = el_residual_margin(n);
    for (std::size_t k = w; k + w < n; ++k) m = std::max(m, std::abs(r[k]));
  }
  return m;
}

double transversality_residual(const Problem& prob, const Trajectory& y,
                               std::size_t l) {
  if (l >= prob.dims)
    throw std::invalid_argument("transversality_residual: bad component index");
  if (prob.boundary[l].right_kind == RightBoundaryKind::Fixed)
    throw std::invalid_argument(
        "transversality_residual: component has a fixed right endpoint");
  const LagrangianPartials parts = lagrangian_partials(prob, y);
  const SampledFunction costate(prob.grid, parts.dv[l]);
  const std::size_t n = prob.grid.size();

  // Right-anchored integral: the node value at b is 0 by the empty-range
  // convention; take the limit by linear extrapolation instead.
  const SampledFunction ir = rlfi_right(costate, 1.0 - prob.params.alpha);
  const double ir_at_b = 2.0 * ir[n - 2] - ir[n - 3];
  const SampledFunction il = rlfi_left(costate, 1.0 - prob.params.beta);
  const double il_at_b = il[n - 1];

  return prob.params.gamma * ir_at_b - (1.0 - prob.params.gamma) * il_at_b;
}

}  // namespace fracvar
