#pragma once

#include "mot/geometry.hpp"
#include "mot/grid.hpp"

namespace mot {

/// Grid function whose induced surface is the lower convex hull of its own
/// node points (envelope-idempotent).
struct PWLConvexFunction {
  const Grid* grid = nullptr;
  Eigen::VectorXd values;
  bool certified_convex = false;

  GridFunction as_grid_function() const {
    GridFunction u;
    u.grid = grid;
    u.values = values;
    return u;
  }
};

/// Largest convex function lying at or below the data at every node.
PWLConvexFunction convex_envelope_pwl(const Grid& grid, const Eigen::VectorXd& values);

/// Subdifferential of u at node x: {p : u(y) >= u(x) + p.(y-x) for all nodes y}.
/// box_halfwidth <= 0 picks a bound from the data's chord slopes.
SubgradientPolytope subgradient_polytope(const PWLConvexFunction& u, int node,
                                         double box_halfwidth = 0);

/// Upper bound on the chord slopes of the node data.
double max_chord_slope(const Grid& grid, const Eigen::VectorXd& values);

}  // namespace mot
