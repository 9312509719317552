#include "fracvar/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace fracvar {

Grid::Grid(double a, double b, std::size_t n) : a_(a), b_(b), n_(n) {
  if (!(a < b)) throw std::domain_error("Grid: requires a < b");
  if (n < 3) throw std::domain_error("Grid: requires at least 3 nodes");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("Grid: endpoints must be finite");
  h_ = (b - a) / static_cast<double>(n - 1);
}

std::vector<double> Grid::nodes() const {
  std::vector<double> xs(n_);
  for (std::size_t k = 0; k < n_; ++k) xs[k] = node(k);
  return xs;
}

SampledFunction::SampledFunction(Grid g, std::vector<double> v)
    : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw std::invalid_argument("SampledFunction: value count != node count");
  for (double x : values)
    if (!std::isfinite(x))
      throw std::invalid_argument("SampledFunction: non-finite sample");
}

double trapezoid(const Grid& g, const std::vector<double>& values) {
  const std::size_t n = g.size();
  double s = 0.5 * (values[0] + values[n - 1]);
  for (std::size_t k = 1; k + 1 < n; ++k) s += values[k];
  return s * g.spacing();
}

double trapezoid(const SampledFunction& f) {
  return trapezoid(f.grid, f.values);
}

double trapezoid_weight(const Grid& g, std::size_t k) {
  return (k == 0 || k + 1 == g.size()) ? 0.5 * g.spacing() : g.spacing();
}

}  // namespace fracvar
