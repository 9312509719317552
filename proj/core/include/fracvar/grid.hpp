#pragma once

#include <cstddef>
#include <vector>

namespace fracvar {

/// Uniform partition of [a, b] with n >= 3 nodes. The last node is
/// assigned b exactly rather than accumulated.
class Grid {
 public:
  Grid(double a, double b, std::size_t n);

  double a() const { return a_; }
  double b() const { return b_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }

  double node(std::size_t k) const {
    return k + 1 == n_ ? b_ : a_ + static_cast<double>(k) * h_;
  }
  std::vector<double> nodes() const;

  bool operator==(const Grid& other) const {
    return a_ == other.a_ && b_ == other.b_ && n_ == other.n_;
  }

 private:
  double a_, b_, h_;
  std::size_t n_;
};

/// Real-valued samples on a Grid. Immutable by convention after
/// construction; all values must be finite.
struct SampledFunction {
  Grid grid;
  std::vector<double> values;

  SampledFunction(Grid g, std::vector<double> v);

  /// Samples fn at every grid node.
  template <typename Fn>
  static SampledFunction sample(const Grid& g, Fn&& fn) {
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = fn(g.node(k));
    return SampledFunction(g, std::move(v));
  }

  static SampledFunction zeros(const Grid& g) {
    return SampledFunction(g, std::vector<double>(g.size(), 0.0));
  }

  double operator[](std::size_t k) const { return values[k]; }
  std::size_t size() const { return values.size(); }
};

/// Composite trapezoid rule for samples on a uniform grid.
double trapezoid(const SampledFunction& f);
double trapezoid(const Grid& g, const std::vector<double>& values);

/// Trapezoid quadrature weight of node k (h at interior nodes, h/2 at ends).
double trapezoid_weight(const Grid& g, std::size_t k);

}  // namespace fracvar
