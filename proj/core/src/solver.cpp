#include "fracvar/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>

extern "C" {
void dsyrk_(const char* uplo, const char* trans, const int* n, const int* k,
            const double* alpha, const double* a, const int* lda,
            const double* beta, double* c, const int* ldc);
void dpotrf_(const char* uplo, const int* n, double* a, const int* lda,
             int* info);
void dpotrs_(const char* uplo, const int* n, const int* nrhs, const double* a,
             const int* lda, double* b, const int* ldb, int* info);
}

namespace fracvar {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Packed decision variables: interior nodes of every component, plus the
// right endpoint of components currently treated as free.
// ---------------------------------------------------------------------------

struct Packing {
  struct Entry {
    std::size_t comp, node;
  };
  std::vector<Entry> entries;

  static Packing build(const Problem& prob, const std::set<std::size_t>& free_right) {
    Packing p;
    const std::size_t n = prob.grid.size();
    for (std::size_t i = 0; i < prob.dims; ++i) {
      for (std::size_t k = 1; k + 1 < n; ++k) p.entries.push_back({i, k});
      if (free_right.count(i)) p.entries.push_back({i, n - 1});
    }
    return p;
  }

  void scatter(const std::vector<double>& x, Trajectory& y) const {
    for (std::size_t m = 0; m < entries.size(); ++m)
      y.values[entries[m].comp][entries[m].node] = x[m];
  }

  std::vector<double> gather(const Trajectory& y) const {
    std::vector<double> x(entries.size());
    for (std::size_t m = 0; m < entries.size(); ++m)
      x[m] = y.values[entries[m].comp][entries[m].node];
    return x;
  }
};

// ---------------------------------------------------------------------------
// Discretized functional with analytic gradient:
//   J(y) = sum_k w_k L(x_k, y(x_k), (M y)(x_k)),
//   dJ/dy_i(x_k) = w_k dL/dy_i(x_k) + (M^T (w .* dL/dv_i))(k).
// ---------------------------------------------------------------------------

class DiscreteFunctional {
 public:
  DiscreteFunctional(const Problem& prob, Packing packing)
      : prob_(prob),
        packing_(std::move(packing)),
        op_(build_operator_matrix(OperatorKind::CombinedCaputo, prob.grid,
                                  prob.params)),
        work_(initial_trajectory(prob)) {
    const std::size_t n = prob.grid.size();
    weights_.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      weights_[k] = trapezoid_weight(prob.grid, k);
  }

  const Packing& packing() const { return packing_; }
  const Matrix& op_matrix() const { return op_.matrix; }

  void set_base(const Trajectory& y) { work_ = y; }
  const Trajectory& current() const { return work_; }

  double value(const std::vector<double>& x) {
    packing_.scatter(x, work_);
    return evaluate_functional(prob_, work_);
  }

  double value_and_gradient(const std::vector<double>& x,
                            std::vector<double>& grad) {
    packing_.scatter(x, work_);
    const LagrangianPartials parts = lagrangian_partials(prob_, work_);
    const std::size_t n = prob_.grid.size();

    // full gradient per component, then gather packed entries
    std::vector<std::vector<double>> full(prob_.dims);
    for (std::size_t i = 0; i < prob_.dims; ++i) {
      std::vector<double> wdv(n);
      for (std::size_t k = 0; k < n; ++k) wdv[k] = weights_[k] * parts.dv[i][k];
      full[i] = op_.matrix.apply_transpose(wdv);
      for (std::size_t k = 0; k < n; ++k)
        full[i][k] += weights_[k] * parts.dy[i][k];
    }
    grad.resize(packing_.entries.size());
    for (std::size_t m = 0; m < grad.size(); ++m)
      grad[m] = full[packing_.entries[m].comp][packing_.entries[m].node];

    return evaluate_functional(prob_, work_);
  }

 private:
  const Problem& prob_;
  Packing packing_;
  DiscreteOperator op_;
  Trajectory work_;
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Operator metric B = W + M^T W M over each component's decision nodes,
// Cholesky-factored and used as the L-BFGS initial Hessian. Without it the
// v-part of the Hessian is as ill-conditioned as a squared derivative and
// the iteration count grows with the node count.
// ---------------------------------------------------------------------------

class Preconditioner {
 public:
  Preconditioner(const Problem& prob, const Packing& packing) {
    const std::size_t n = prob.grid.size();
    const DiscreteOperator op = build_operator_matrix(
        OperatorKind::CombinedCaputo, prob.grid, prob.params);
    std::vector<double> w(n), sw(n);
    for (std::size_t k = 0; k < n; ++k) {
      w[k] = trapezoid_weight(prob.grid, k);
      sw[k] = std::sqrt(w[k]);
    }

    std::vector<std::vector<std::size_t>> nodes(prob.dims);
    for (const auto& e : packing.entries) nodes[e.comp].push_back(e.node);

    // blocks only differ by whether the right endpoint is a decision node,
    // so factor each distinct node list once
    std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Factor>>
        cache;
    offsets_.resize(prob.dims);
    blocks_.resize(prob.dims);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < prob.dims; ++i) {
      offsets_[i] = offset;
      offset += nodes[i].size();
      if (nodes[i].empty()) continue;
      const auto key = std::make_pair(nodes[i].size(), nodes[i].back());
      auto it = cache.find(key);
      if (it == cache.end())
        it = cache.emplace(key, factor(op.matrix, w, sw, nodes[i])).first;
      blocks_[i] = it->second;
    }
  }

  // d := B^{-1} d blockwise; a block whose factorization failed is skipped
  // (plain gradient scale there).
  void apply_inverse(std::vector<double>& d) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Factor* f = blocks_[i].get();
      if (f == nullptr || f->m == 0) continue;
      const int one = 1;
      int info = 0;
      dpotrs_("L", &f->m, &one, f->chol.data(), &f->m, d.data() + offsets_[i],
              &f->m, &info);
    }
  }

 private:
  struct Factor {
    int m = 0;
    std::vector<double> chol;  // column-major lower triangle
  };

  static std::shared_ptr<const Factor> factor(
      const Matrix& mat, const std::vector<double>& w,
      const std::vector<double>& sw, const std::vector<std::size_t>& list) {
    const int n = int(w.size());
    const int m = int(list.size());
    std::vector<double> a(std::size_t(n) * m);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < n; ++k)
        a[std::size_t(i) * n + k] = sw[k] * mat(k, list[i]);
    auto f = std::make_shared<Factor>();
    f->m = m;
    f->chol.assign(std::size_t(m) * m, 0.0);
    const double one = 1.0, zero = 0.0;
    dsyrk_("L", "T", &m, &n, &one, a.data(), &n, &zero, f->chol.data(), &m);
    for (int i = 0; i < m; ++i)
      f->chol[std::size_t(i) * m + i] += w[list[i]];
    int info = 0;
    dpotrf_("L", &m, f->chol.data(), &m, &info);
    if (info != 0) f->m = 0;  // not SPD numerically; disable this block
    return f;
  }

  std::vector<std::size_t> offsets_;
  std::vector<std::shared_ptr<const Factor>> blocks_;
};

// ---------------------------------------------------------------------------
// L-BFGS with Armijo backtracking
// ---------------------------------------------------------------------------

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct MinimizeResult {
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

MinimizeResult lbfgs_minimize(DiscreteFunctional& fn, std::vector<double>& x,
                              const SolverOptions& opts, double tol_g,
                              const Preconditioner* pre) {
  const std::size_t dim = x.size();
  MinimizeResult res;
  if (dim == 0) {
    res.converged = true;
    return res;
  }

  std::deque<std::pair<std::vector<double>, std::vector<double>>> history;  // (s, y)
  std::vector<double> g(dim), g_new(dim);
  double f = fn.value_and_gradient(x, g);

  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    res.iterations = iter;
    res.grad_norm = inf_norm(g);
    if (res.grad_norm < tol_g) {
      res.converged = true;
      return res;
    }

    // two-loop recursion
    std::vector<double> d(g.begin(), g.end());
    std::vector<double> alpha(history.size());
    for (std::size_t h = history.size(); h-- > 0;) {
      const auto& [s, yv] = history[h];
      const double rho = 1.0 / dot(yv, s);
      alpha[h] = rho * dot(s, d);
      for (std::size_t i = 0; i < dim; ++i) d[i] -= alpha[h] * yv[i];
    }
    if (pre != nullptr) {
      pre->apply_inverse(d);
      if (!history.empty()) {
        const auto& [s, yv] = history.back();
        std::vector<double> z = yv;
        pre->apply_inverse(z);
        const double denom = dot(yv, z);
        if (denom > 0.0) {
          const double scale = dot(s, yv) / denom;
          for (double& di : d) di *= scale;
        }
      }
    } else if (!history.empty()) {
      const auto& [s, yv] = history.back();
      const double scale = dot(s, yv) / dot(yv, yv);
      for (double& di : d) di *= scale;
    }
    for (std::size_t h = 0; h < history.size(); ++h) {
      const auto& [s, yv] = history[h];
      const double rho = 1.0 / dot(yv, s);
      const double beta = rho * dot(yv, d);
      for (std::size_t i = 0; i < dim; ++i) d[i] += (alpha[h] - beta) * s[i];
    }
    for (double& di : d) di = -di;

    double gd = dot(g, d);
    if (!(gd < 0.0)) {  // not a descent direction, fall back to steepest
      for (std::size_t i = 0; i < dim; ++i) d[i] = -g[i];
      gd = -dot(g, g);
    }

    double t = history.empty() && pre == nullptr
                   ? 1.0 / (1.0 + std::sqrt(-gd))
                   : 1.0;
    std::vector<double> x_new(dim);
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < dim; ++i) x_new[i] = x[i] + t * d[i];
      f_new = fn.value(x_new);
      if (f_new <= f + 1e-4 * t * gd) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // line search stalled at numerical floor

    f_new = fn.value_and_gradient(x_new, g_new);
    std::vector<double> s(dim), yv(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, yv);
    if (sy > 1e-14 * std::sqrt(dot(s, s)) * std::sqrt(dot(yv, yv))) {
      history.emplace_back(std::move(s), std::move(yv));
      if (history.size() > opts.lbfgs_memory) history.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
  }
  res.grad_norm = inf_norm(g);
  res.converged = res.grad_norm < tol_g;
  return res;
}

// ---------------------------------------------------------------------------
// Shared solve machinery
// ---------------------------------------------------------------------------

struct InnerResult {
  Trajectory y;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

// Minimizes the integrand of prob_like (its lagrangian field) over interior
// values, the listed free right endpoints, with optional right endpoints
// pinned to override values.
InnerResult minimize_functional(const Problem& prob_like,
                                const std::set<std::size_t>& free_right,
                                const std::map<std::size_t, double>& pinned_right,
                                const Trajectory* warm_start,
                                double tol_g,
                                const Preconditioner* pre = nullptr) {
  Packing packing = Packing::build(prob_like, free_right);
  DiscreteFunctional fn(prob_like, packing);
  std::optional<Preconditioner> own;
  if (pre == nullptr) {
    own.emplace(prob_like, fn.packing());
    pre = &*own;
  }

  Trajectory base =
      warm_start != nullptr ? *warm_start : initial_trajectory(prob_like);
  for (const auto& [comp, value] : pinned_right)
    base.values[comp][base.nodes() - 1] = value;
  fn.set_base(base);

  std::vector<double> x = fn.packing().gather(base);
  const MinimizeResult m =
      lbfgs_minimize(fn, x, prob_like.options, tol_g, pre);

  Trajectory y = base;
  fn.packing().scatter(x, y);
  return InnerResult{std::move(y), m.iterations, m.grad_norm, m.converged};
}

ExprAst augmented_integrand(const ExprAst& lagrangian,
                            const std::vector<const Constraint*>& constraints,
                            const std::vector<double>& lambda) {
  ExprPtr root = lagrangian.root;
  for (std::size_t j = 0; j < constraints.size(); ++j)
    root = make_binary(
        BinaryOp::Sub, root,
        make_binary(BinaryOp::Mul, make_const(lambda[j]),
                    constraints[j]->integrand.root));
  return ExprAst{root, lagrangian.dims};
}

// r x r linear solve, Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
  const std::size_t r = b.size();
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < r; ++i)
      if (std::abs(a[i][col]) > std::abs(a[piv][col])) piv = i;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    if (a[col][col] == 0.0)
      throw std::runtime_error("singular multiplier system");
    for (std::size_t i = col + 1; i < r; ++i) {
      const double m = a[i][col] / a[col][col];
      for (std::size_t j = col; j < r; ++j) a[i][j] -= m * a[col][j];
      b[i] -= m * b[col];
    }
  }
  std::vector<double> x(r);
  for (std::size_t i = r; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < r; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

double determinant(std::vector<std::vector<double>> a) {
  const std::size_t r = a.size();
  double det = 1.0;
  for (std::size_t col = 0; col < r; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < r; ++i)
      if (std::abs(a[i][col]) > std::abs(a[piv][col])) piv = i;
    if (piv != col) {
      std::swap(a[col], a[piv]);
      det = -det;
    }
    if (a[col][col] == 0.0) return 0.0;
    det *= a[col][col];
    for (std::size_t i = col + 1; i < r; ++i) {
      const double m = a[i][col] / a[col][col];
      for (std::size_t j = col; j < r; ++j) a[i][j] -= m * a[col][j];
    }
  }
  return det;
}

std::vector<std::vector<double>> variation_matrix(
    const Problem& prob, const std::vector<const Constraint*>& constraints,
    const Trajectory& y, const std::vector<VariationProbe>& probes) {
  const std::size_t r = constraints.size();
  std::vector<std::vector<double>> a(r, std::vector<double>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      a[i][j] = first_variation_of(prob, constraints[i]->integrand, y, probes[j]);
  return a;
}

bool regularity_holds(const Problem& prob,
                      const std::vector<const Constraint*>& constraints,
                      const Trajectory& y) {
  const auto probes = standard_probes(prob, constraints.size());
  const auto a = variation_matrix(prob, constraints, y, probes);
  double row_scale = 1.0;
  for (const auto& row : a) {
    double norm = 0.0;
    for (double v : row) norm += v * v;
    row_scale *= std::max(std::sqrt(norm), 1e-300);
  }
  return std::abs(determinant(a)) / row_scale >= prob.options.tol_reg;
}

// EL residual of the given stationarity integrand, and the scaled tolerance
// it is judged against.
std::pair<double, double> el_certificate(const Problem& prob,
                                         const ExprAst& integrand,
                                         const Trajectory& y) {
  Problem aug = prob;
  aug.lagrangian = integrand;
  const double residual = el_residual_interior_max(el_residual(aug, y));
  const LagrangianPartials parts = lagrangian_partials(aug, y);
  double dy_scale = 0.0;
  for (const auto& comp : parts.dy) {
    const std::size_t n = comp.size();
    const std::size_t w = el_residual_margin(n);
    for (std::size_t k = w; k + w < n; ++k)
      dy_scale = std::max(dy_scale, std::abs(comp[k]));
  }
  const double tol = prob.options.tol_r_scale * std::max(1.0, dy_scale);
  return {residual, tol};
}

void require_fixed_boundaries(const Problem& prob, const char* who) {
  for (const auto& bc : prob.boundary)
    if (bc.right_kind != RightBoundaryKind::Fixed)
      throw std::invalid_argument(std::string(who) +
                                  ": requires fixed boundaries on both ends");
}

}  // namespace

std::vector<double> functional_gradient(const Problem& prob,
                                        const Trajectory& y) {
  prob.validate();
  DiscreteFunctional fn(prob, Packing::build(prob, {}));
  fn.set_base(y);
  std::vector<double> grad;
  fn.value_and_gradient(fn.packing().gather(y), grad);
  return grad;
}

Trajectory initial_trajectory(const Problem& prob) {
  const std::size_t n = prob.grid.size();
  Trajectory y(prob.grid, prob.dims);
  for (std::size_t i = 0; i < prob.dims; ++i) {
    const double left = prob.boundary[i].left;
    const double right = prob.boundary[i].right_kind == RightBoundaryKind::Fixed
                             ? prob.boundary[i].right
                             : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = double(k) / double(n - 1);
      y.values[i][k] = left + s * (right - left);
    }
  }
  return y;
}

std::vector<VariationProbe> standard_probes(const Problem& prob,
                                            std::size_t count) {
  std::vector<VariationProbe> probes;
  probes.reserve(count);
  const double a = prob.grid.a(), b = prob.grid.b();
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t comp = j % prob.dims;
    const double mode = double(j / prob.dims) + 1.0;
    Trajectory h(prob.grid, prob.dims);
    for (std::size_t k = 0; k < prob.grid.size(); ++k) {
      const double s = (prob.grid.node(k) - a) / (b - a);
      h.values[comp][k] = std::sin(mode * kPi * s);
    }
    h.values[comp][0] = 0.0;
    h.values[comp][prob.grid.size() - 1] = 0.0;  // exact zeros at the anchors
    probes.push_back(VariationProbe{std::move(h)});
  }
  return probes;
}

double check_regularity(const Problem& prob, const Trajectory& y,
                        const std::vector<VariationProbe>& probes) {
  if (prob.constraints.empty())
    throw std::invalid_argument("check_regularity: problem has no constraints");
  if (probes.size() < prob.constraints.size())
    throw std::invalid_argument("check_regularity: fewer probes than constraints");
  std::vector<const Constraint*> cs;
  for (const auto& c : prob.constraints) cs.push_back(&c);
  std::vector<VariationProbe> used(probes.begin(),
                                   probes.begin() + cs.size());
  return determinant(variation_matrix(prob, cs, y, used));
}

SolveReport solve_basic(const Problem& prob) {
  prob.validate();
  require_fixed_boundaries(prob, "solve_basic");
  if (!prob.constraints.empty())
    throw std::invalid_argument("solve_basic: use the isoperimetric solvers");

  const InnerResult inner =
      minimize_functional(prob, {}, {}, nullptr, prob.options.tol_g);

  SolveReport report{inner.y};
  report.cost = evaluate_functional(prob, inner.y);
  const auto [res, tol] = el_certificate(prob, prob.lagrangian, inner.y);
  report.el_residual_max = res;
  report.iterations = inner.iterations;
  report.gradient_norm = inner.grad_norm;
  report.converged = inner.converged && res < tol;
  if (!inner.converged)
    report.diagnostic = "gradient iteration did not reach tolerance";
  else if (res >= tol)
    report.diagnostic = "Euler-Lagrange residual above tolerance";
  return report;
}

SolveReport solve_free_endpoint(const Problem& prob) {
  prob.validate();
  if (!prob.constraints.empty())
    throw std::invalid_argument(
        "solve_free_endpoint: constraints are not supported here");
  std::set<std::size_t> free_right;
  for (std::size_t i = 0; i < prob.dims; ++i)
    if (prob.boundary[i].right_kind != RightBoundaryKind::Fixed)
      free_right.insert(i);
  if (free_right.empty())
    throw std::invalid_argument(
        "solve_free_endpoint: no free or bounded right endpoints");

  std::map<std::size_t, double> pinned;
  std::vector<bool> active(prob.dims, false);
  InnerResult inner{initial_trajectory(prob)};
  const Trajectory* warm = nullptr;

  // active-set loop over the bounded endpoints: solve free, pin violations
  for (std::size_t round = 0; round <= prob.dims; ++round) {
    inner = minimize_functional(prob, free_right, pinned, warm,
                                prob.options.tol_g);
    warm = &inner.y;
    bool changed = false;
    const std::size_t last = prob.grid.size() - 1;
    for (std::size_t l : std::vector<std::size_t>(free_right.begin(),
                                                  free_right.end())) {
      if (prob.boundary[l].right_kind != RightBoundaryKind::UpperBounded)
        continue;
      if (inner.y.values[l][last] > prob.boundary[l].right + prob.options.tol_c) {
        free_right.erase(l);
        pinned[l] = prob.boundary[l].right;
        active[l] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }

  SolveReport report{inner.y};
  report.cost = evaluate_functional(prob, inner.y);
  const auto [res, tol] = el_certificate(prob, prob.lagrangian, inner.y);
  report.el_residual_max = res;
  report.iterations = inner.iterations;
  report.gradient_norm = inner.grad_norm;
  report.bound_active = active;

  bool certified = true;
  const std::size_t last = prob.grid.size() - 1;
  for (std::size_t i = 0; i < prob.dims; ++i) {
    const auto& bc = prob.boundary[i];
    if (bc.right_kind == RightBoundaryKind::Fixed) continue;
    const double t = transversality_residual(prob, inner.y, i);
    report.transversality_residuals[i] = t;
    if (bc.right_kind == RightBoundaryKind::Free) {
      if (std::abs(t) >= prob.options.tol_t) {
        certified = false;
        report.diagnostic = "transversality residual above tolerance";
      }
    } else {
      const double slack = bc.right - inner.y.values[i][last];
      report.complementary_slackness.push_back(-slack * t);
      if (active[i]) {
        // at an active upper bound the minimization sign condition is T <= 0,
        // and the endpoint is pinned so slack * T vanishes with it
        if (t > prob.options.tol_t) {
          certified = false;
          report.diagnostic =
              "sign condition violated at active endpoint bound";
        }
        if (std::abs(slack * t) >= prob.options.tol_cs) {
          certified = false;
          report.diagnostic = "complementary slackness violated at endpoint";
        }
      } else if (std::abs(t) >= prob.options.tol_t || slack < -prob.options.tol_c) {
        // non-binding bound: the endpoint must satisfy the free-end condition
        certified = false;
        report.diagnostic = "free-branch certificate failed at bounded endpoint";
      }
    }
  }

  report.converged = inner.converged && certified && res < tol;
  if (res >= tol)
    report.diagnostic = "Euler-Lagrange residual above tolerance";
  if (!inner.converged)
    report.diagnostic = "gradient iteration did not reach tolerance";
  return report;
}

namespace {

// Equality-constrained solve over a constraint subset; shared by the
// equality and inequality front ends. Outer Newton iteration on the
// multipliers, finite-difference sensitivity, warm-started inner solves.
struct ConstrainedResult {
  InnerResult inner;
  std::vector<double> lambda;
  std::vector<double> residuals;
  ExprAst stationarity;  // L - sum lambda_j G^j at the final multipliers
  bool constraints_met = false;
  std::size_t outer_iterations = 0;
};

ConstrainedResult solve_equality_subset(
    const Problem& prob, const std::vector<const Constraint*>& active) {
  const std::size_t r = active.size();
  const double inner_tol = std::min(prob.options.tol_g, 1e-10);
  std::vector<double> lambda(r, 0.0);

  ConstrainedResult out{InnerResult{initial_trajectory(prob)}};
  out.stationarity = prob.lagrangian;

  auto residuals_at = [&](const Trajectory& y) {
    std::vector<double> c(r);
    for (std::size_t j = 0; j < r; ++j)
      c[j] = evaluate_integral(prob, active[j]->integrand, y) - active[j]->target;
    return c;
  };

  Problem aug = prob;
  // the packing is identical for every inner solve; factor the metric once
  const Preconditioner pre(prob, Packing::build(prob, {}));
  const Trajectory* warm = nullptr;
  for (std::size_t outer = 0; outer < prob.options.outer_max_iter; ++outer) {
    out.outer_iterations = outer + 1;
    aug.lagrangian = augmented_integrand(prob.lagrangian, active, lambda);
    out.inner = minimize_functional(aug, {}, {}, warm, inner_tol, &pre);
    warm = &out.inner.y;
    out.residuals = residuals_at(out.inner.y);
    out.lambda = lambda;
    out.stationarity = aug.lagrangian;

    double cmax = 0.0;
    for (double c : out.residuals) cmax = std::max(cmax, std::abs(c));
    if (cmax < prob.options.tol_c) {
      out.constraints_met = true;
      return out;
    }

    // finite-difference sensitivity dG/dlambda
    std::vector<std::vector<double>> jac(r, std::vector<double>(r));
    for (std::size_t j = 0; j < r; ++j) {
      std::vector<double> lp = lambda;
      const double delta = 1e-2 * (1.0 + std::abs(lambda[j]));
      lp[j] += delta;
      aug.lagrangian = augmented_integrand(prob.lagrangian, active, lp);
      const InnerResult probe =
          minimize_functional(aug, {}, {}, warm, inner_tol, &pre);
      const std::vector<double> cp = residuals_at(probe.y);
      for (std::size_t i = 0; i < r; ++i)
        jac[i][j] = (cp[i] - out.residuals[i]) / delta;
    }
    std::vector<double> rhs(r);
    for (std::size_t i = 0; i < r; ++i) rhs[i] = -out.residuals[i];
    std::vector<double> step;
    try {
      step = solve_dense(jac, rhs);
    } catch (const std::runtime_error&) {
      return out;  // singular sensitivity, give up with constraints unmet
    }
    for (std::size_t j = 0; j < r; ++j) lambda[j] += step[j];
  }
  return out;
}

SolveReport report_from_constrained(const Problem& prob,
                                    const ConstrainedResult& cr) {
  SolveReport report{cr.inner.y};
  report.cost = evaluate_functional(prob, cr.inner.y);
  const auto [res, tol] = el_certificate(prob, cr.stationarity, cr.inner.y);
  report.el_residual_max = res;
  report.iterations = cr.inner.iterations;
  report.gradient_norm = cr.inner.grad_norm;
  report.converged = cr.inner.converged && cr.constraints_met && res < tol;
  if (!cr.constraints_met)
    report.diagnostic = "constraint residuals above tolerance";
  else if (!cr.inner.converged)
    report.diagnostic = "gradient iteration did not reach tolerance";
  else if (res >= tol)
    report.diagnostic = "Euler-Lagrange residual above tolerance";
  return report;
}

}  // namespace

SolveReport solve_isoperimetric(const Problem& prob) {
  prob.validate();
  require_fixed_boundaries(prob, "solve_isoperimetric");
  if (prob.constraints.empty())
    throw std::invalid_argument("solve_isoperimetric: no constraints given");
  for (const auto& c : prob.constraints)
    if (c.relation != ConstraintRelation::Equality)
      throw std::invalid_argument(
          "solve_isoperimetric: inequality constraints need "
          "solve_isoperimetric_ineq");

  std::vector<const Constraint*> cs;
  for (const auto& c : prob.constraints) cs.push_back(&c);

  const Trajectory y0 = initial_trajectory(prob);
  if (!regularity_holds(prob, cs, y0)) {
    SolveReport report{y0};
    report.abnormal = true;
    report.converged = false;
    report.multipliers.assign(cs.size(), 0.0);
    report.constraint_residuals.assign(cs.size(), 0.0);
    report.diagnostic =
        "abnormal problem: constraint first variations are degenerate "
        "(near-zero Gram determinant)";
    return report;
  }

  const ConstrainedResult cr = solve_equality_subset(prob, cs);
  SolveReport report = report_from_constrained(prob, cr);
  report.multipliers = cr.lambda;
  report.constraint_residuals = cr.residuals;
  report.complementary_slackness.assign(cs.size(), 0.0);
  return report;
}

SolveReport solve_isoperimetric_ineq(const Problem& prob) {
  prob.validate();
  require_fixed_boundaries(prob, "solve_isoperimetric_ineq");
  if (prob.constraints.empty())
    throw std::invalid_argument("solve_isoperimetric_ineq: no constraints");

  const std::size_t r = prob.constraints.size();
  std::set<std::size_t> active;
  std::size_t ineq_count = 0;
  for (std::size_t j = 0; j < r; ++j) {
    if (prob.constraints[j].relation == ConstraintRelation::Equality)
      active.insert(j);  // equalities are always active
    else
      ++ineq_count;
  }
  const std::size_t change_cap = std::size_t(1) << std::min<std::size_t>(ineq_count, 16);

  std::vector<double> lambda(r, 0.0);
  std::vector<double> slack(r, 0.0);
  std::optional<ConstrainedResult> cr;
  bool cycled = true;
  std::size_t changes = 0;

  while (changes <= change_cap) {
    std::vector<const Constraint*> act;
    std::vector<std::size_t> act_idx;
    for (std::size_t j : active) {
      act.push_back(&prob.constraints[j]);
      act_idx.push_back(j);
    }

    if (act.empty()) {
      Problem unconstrained = prob;
      unconstrained.constraints.clear();
      const SolveReport base = solve_basic(unconstrained);
      cr = ConstrainedResult{InnerResult{base.trajectory, base.iterations,
                                         base.gradient_norm, base.converged}};
      cr->stationarity = prob.lagrangian;
      cr->constraints_met = true;
    } else {
      if (!regularity_holds(prob, act, initial_trajectory(prob))) {
        SolveReport report{initial_trajectory(prob)};
        report.abnormal = true;
        report.diagnostic = "abnormal active constraint set";
        report.multipliers.assign(r, 0.0);
        return report;
      }
      cr = solve_equality_subset(prob, act);
    }

    lambda.assign(r, 0.0);
    for (std::size_t m = 0; m < act_idx.size(); ++m)
      lambda[act_idx[m]] = cr->lambda.empty() ? 0.0 : cr->lambda[m];
    for (std::size_t j = 0; j < r; ++j)
      slack[j] = prob.constraints[j].target -
                 evaluate_integral(prob, prob.constraints[j].integrand,
                                   cr->inner.y);

    // activate the most violated inactive inequality
    std::ptrdiff_t worst = -1;
    for (std::size_t j = 0; j < r; ++j) {
      if (active.count(j) ||
          prob.constraints[j].relation != ConstraintRelation::InequalityLe)
        continue;
      if (slack[j] < -prob.options.tol_c &&
          (worst < 0 || slack[j] < slack[std::size_t(worst)]))
        worst = std::ptrdiff_t(j);
    }
    if (worst >= 0) {
      active.insert(std::size_t(worst));
      ++changes;
      continue;
    }

    // drop an active inequality whose multiplier has the wrong sign
    // (stationarity uses L - lambda G, so an active <= constraint in a
    // minimization carries lambda <= 0)
    std::ptrdiff_t wrong = -1;
    for (std::size_t j : active) {
      if (prob.constraints[j].relation != ConstraintRelation::InequalityLe)
        continue;
      if (lambda[j] > prob.options.tol_cs &&
          (wrong < 0 || lambda[j] > lambda[std::size_t(wrong)]))
        wrong = std::ptrdiff_t(j);
    }
    if (wrong >= 0) {
      active.erase(std::size_t(wrong));
      ++changes;
      continue;
    }

    cycled = false;
    break;
  }

  SolveReport report = report_from_constrained(prob, *cr);
  report.multipliers = lambda;
  report.constraint_residuals.resize(r);
  report.complementary_slackness.resize(r);
  bool certified = true;
  for (std::size_t j = 0; j < r; ++j) {
    report.constraint_residuals[j] =
        prob.constraints[j].relation == ConstraintRelation::Equality
            ? -slack[j]
            : std::max(0.0, -slack[j]);
    report.complementary_slackness[j] = lambda[j] * slack[j];
    if (prob.constraints[j].relation == ConstraintRelation::InequalityLe) {
      if (slack[j] < -prob.options.tol_c) certified = false;
      if (std::abs(lambda[j] * slack[j]) >= prob.options.tol_cs)
        certified = false;
    }
  }
  if (cycled) {
    report.converged = false;
    report.diagnostic = "active-set iteration cycled";
  } else if (!certified) {
    report.converged = false;
    report.diagnostic = "inequality certificates failed";
  }
  return report;
}

}  // namespace fracvar
