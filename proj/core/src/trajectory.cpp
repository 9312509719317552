#include "fracvar/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace fracvar {

Trajectory::Trajectory(Grid g, std::size_t dims)
    : grid(g), values(dims, std::vector<double>(g.size(), 0.0)) {
  if (dims < 1) throw std::invalid_argument("Trajectory: dims must be >= 1");
}

Trajectory::Trajectory(Grid g, std::vector<std::vector<double>> comps)
    : grid(g), values(std::move(comps)) {
  if (values.empty()) throw std::invalid_argument("Trajectory: no components");
  for (const auto& c : values) {
    if (c.size() != grid.size())
      throw std::invalid_argument("Trajectory: component length != node count");
    for (double x : c)
      if (!std::isfinite(x))
        throw std::invalid_argument("Trajectory: non-finite value");
  }
}

double Trajectory::max_node_distance(const Trajectory& other) const {
  if (other.dims() != dims() || !(other.grid == grid))
    throw std::invalid_argument("max_node_distance: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < dims(); ++i)
    for (std::size_t k = 0; k < nodes(); ++k)
      m = std::max(m, std::abs(values[i][k] - other.values[i][k]));
  return m;
}

}  // namespace fracvar
