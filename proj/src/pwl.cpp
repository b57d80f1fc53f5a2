#include "mot/pwl.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

namespace mot {

PWLConvexFunction convex_envelope_pwl(const Grid& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.size()) throw std::invalid_argument("value count mismatch");
  if (!values.allFinite()) throw std::invalid_argument("non-finite node values");
  const auto env = lower_convex_envelope(
      std::span<const Vec2>(grid.pos.data(), grid.pos.size()),
      std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
  PWLConvexFunction out;
  out.grid = &grid;
  out.values = Eigen::Map<const Eigen::VectorXd>(env.data(), static_cast<long>(env.size()));
  out.certified_convex = true;
  return out;
}

double max_chord_slope(const Grid& grid, const Eigen::VectorXd& values) {
  // slope of the steepest chord from any node to one of its near neighbours;
  // for convex data this bounds every subgradient coordinate
  double s = 0;
  for (int i = 0; i < grid.size(); ++i) {
    for (int j : grid.nodes_within(grid.pos[i], 2.5 * grid.h)) {
      if (j == i) continue;
      const double d = (grid.pos[j] - grid.pos[i]).norm();
      if (d > 1e-14) s = std::max(s, std::abs(values[j] - values[i]) / d);
    }
  }
  return s;
}

SubgradientPolytope subgradient_polytope(const PWLConvexFunction& u, int node,
                                         double box_halfwidth) {
  if (!u.certified_convex)
    throw std::invalid_argument("subgradient undefined for non-convex data");
  const Grid& g = *u.grid;
  if (node < 0 || node >= g.size()) throw std::out_of_range("unknown node");
  double box = box_halfwidth;
  if (box <= 0) box = 2.0 * max_chord_slope(g, u.values) + 1.0;
  return subgradient_polytope_at(
      std::span<const Vec2>(g.pos.data(), g.pos.size()),
      std::span<const double>(u.values.data(), static_cast<std::size_t>(u.values.size())),
      node, box);
}

}  // namespace mot
