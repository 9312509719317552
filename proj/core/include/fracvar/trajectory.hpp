#pragma once

#include <vector>

#include "fracvar/grid.hpp"

namespace fracvar {

/// N-dimensional sampled curve: component i is values[i] on the grid.
struct Trajectory {
  Grid grid;
  std::vector<std::vector<double>> values;  // dims x n

  Trajectory(Grid g, std::size_t dims);
  Trajectory(Grid g, std::vector<std::vector<double>> comps);

  std::size_t dims() const { return values.size(); }
  std::size_t nodes() const { return grid.size(); }

  SampledFunction component(std::size_t i) const {
    return SampledFunction(grid, values[i]);
  }

  template <typename Fn>
  static Trajectory sample(const Grid& g, std::size_t dims, Fn&& fn) {
    Trajectory t(g, dims);
    for (std::size_t i = 0; i < dims; ++i)
      for (std::size_t k = 0; k < g.size(); ++k)
        t.values[i][k] = fn(i, g.node(k));
    return t;
  }

  /// max_k |y(x_k) - other(x_k)| over all components.
  double max_node_distance(const Trajectory& other) const;
};

}  // namespace fracvar
