#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mot/common.hpp"
#include "mot/geometry.hpp"

namespace mot {

struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double perimeter() const { return 2.0 * (width() + height()); }
  Vec2 center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(const Vec2& p, double tol = 0) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol && p.y() <= y1 + tol;
  }
  bool strictly_inside(const Vec2& p, double tol = 1e-12) const {
    return p.x() > x0 + tol && p.x() < x1 - tol && p.y() > y0 + tol && p.y() < y1 - tol;
  }
  Polygon polygon() const { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }
};

enum class NodeKind { Interior, Boundary };

/// Discretisation point set: interior Cartesian lattice of spacing h anchored
/// at the domain center, plus boundary points of arclength spacing <= h^{3/2}
/// placed counterclockwise from the lower-left corner.  When a side length is
/// an integer multiple of h, the per-side boundary count is rounded up to a
/// multiple of side/h so the wall points of the lattice are hit exactly.
struct Grid {
  Rect domain;
  double h = 0;

  std::vector<Vec2> pos;
  std::vector<NodeKind> kind;
  std::vector<double> area;  // Voronoi cell areas, partition of the domain
  int n_interior = 0;        // nodes [0, n_interior) are interior, rest boundary

  // interior lattice: pos = (ox + i*h, oy + j*h), 0 <= i < nx, 0 <= j < ny
  int nx = 0, ny = 0;
  double ox = 0, oy = 0;

  int size() const { return static_cast<int>(pos.size()); }
  bool interior(int i) const { return kind[i] == NodeKind::Interior; }

  int interior_index(int i, int j) const { return j * nx + i; }

  /// Exact node at position p (within tol), or nullopt.
  std::optional<int> node_at(const Vec2& p, double tol) const;
  int nearest_node(const Vec2& p) const;
  std::vector<int> nodes_within(const Vec2& p, double r) const;
  int nearest_boundary_node(const Vec2& p) const;

 private:
  friend Grid build_grid(const Rect& X, double h);
  // uniform bucket grid for radius/nearest queries
  std::vector<std::vector<int>> buckets_;
  int bnx_ = 0, bny_ = 0;
  double bcell_ = 0;
  std::vector<int> boundary_side_start_;  // node index of first point of each side
  std::vector<int> boundary_side_count_;
  int bucket_of(const Vec2& p) const;
};

Grid build_grid(const Rect& X, double h);

double voronoi_area(const Grid& grid, int node);

struct GridFunction {
  const Grid* grid = nullptr;
  Eigen::VectorXd values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g) : grid(&g), values(Eigen::VectorXd::Zero(g.size())) {}

  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};

template <class F>
GridFunction sample(const Grid& g, F&& f) {
  GridFunction u(g);
  for (int i = 0; i < g.size(); ++i) u[i] = f(g.pos[i]);
  return u;
}

/// Piecewise-constant nearest-neighbours extension: sup of u over the nodes at
/// minimal distance from x.
double nn_extension(const GridFunction& u, const Vec2& x);

void write_grid_csv(const Grid& g, std::ostream& os);
void write_grid_function_csv(const GridFunction& u, std::ostream& os);

}  // namespace mot
