#include "mot/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mot {

namespace {

// Number of boundary points for a side of length L.  Spacing must not exceed
// h^{3/2}; when L is an integer multiple of h the count is rounded up to a
// multiple of L/h so that the wall points aligned with the interior lattice
// are hit exactly (keeps near-boundary stencils exact).
int side_point_count(double L, double h) {
  const double s_max = std::pow(h, 1.5);
  const int n_min = static_cast<int>(std::ceil(L / s_max - 1e-12));
  const double ratio = L / h;
  const int base = static_cast<int>(std::llround(ratio));
  if (base >= 1 && std::abs(ratio - base) < 1e-9) {
    const int k = (n_min + base - 1) / base;
    return base * std::max(k, 1);
  }
  return std::max(n_min, 1);
}

}  // namespace

int Grid::bucket_of(const Vec2& p) const {
  int bi = static_cast<int>(std::floor((p.x() - domain.x0) / bcell_));
  int bj = static_cast<int>(std::floor((p.y() - domain.y0) / bcell_));
  bi = std::clamp(bi, 0, bnx_ - 1);
  bj = std::clamp(bj, 0, bny_ - 1);
  return bj * bnx_ + bi;
}

std::vector<int> Grid::nodes_within(const Vec2& p, double r) const {
  std::vector<int> out;
  const int i0 = std::clamp(static_cast<int>(std::floor((p.x() - r - domain.x0) / bcell_)), 0, bnx_ - 1);
  const int i1 = std::clamp(static_cast<int>(std::floor((p.x() + r - domain.x0) / bcell_)), 0, bnx_ - 1);
  const int j0 = std::clamp(static_cast<int>(std::floor((p.y() - r - domain.y0) / bcell_)), 0, bny_ - 1);
  const int j1 = std::clamp(static_cast<int>(std::floor((p.y() + r - domain.y0) / bcell_)), 0, bny_ - 1);
  const double r2 = r * r;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      for (int id : buckets_[j * bnx_ + i])
        if ((pos[id] - p).squaredNorm() <= r2) out.push_back(id);
  return out;
}

std::optional<int> Grid::node_at(const Vec2& p, double tol) const {
  int best = -1;
  double bd = tol;
  for (int id : nodes_within(p, tol)) {
    const double d = (pos[id] - p).norm();
    if (d <= bd) {
      bd = d;
      best = id;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

int Grid::nearest_node(const Vec2& p) const {
  double r = h;
  while (true) {
    const auto cand = nodes_within(p, r);
    if (!cand.empty()) {
      int best = cand[0];
      double bd = (pos[best] - p).squaredNorm();
      for (int id : cand) {
        const double d = (pos[id] - p).squaredNorm();
        if (d < bd) {
          bd = d;
          best = id;
        }
      }
      // nodes just outside r could still be closer only if bd > (r - h)^2;
      // enlarge once more to be safe
      if (std::sqrt(bd) + 1e-12 <= r) return best;
    }
    r *= 2;
    if (r > domain.width() + domain.height()) {
      // brute force fallback
      int best = 0;
      double bd = (pos[0] - p).squaredNorm();
      for (int id = 1; id < size(); ++id) {
        const double d = (pos[id] - p).squaredNorm();
        if (d < bd) {
          bd = d;
          best = id;
        }
      }
      return best;
    }
  }
}

int Grid::nearest_boundary_node(const Vec2& p) const {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < boundary_side_start_.size(); ++s) {
    const int start = boundary_side_start_[s];
    const int count = boundary_side_count_[s];
    for (int k = 0; k < count; ++k) {
      const double d = (pos[start + k] - p).squaredNorm();
      if (d < bd) {
        bd = d;
        best = start + k;
      }
    }
  }
  return best;
}

Grid build_grid(const Rect& X, double h) {
  if (!(h > 0) || h >= std::min(X.width(), X.height()) / 4.0)
    throw std::invalid_argument("resolution insufficient");
  Grid g;
  g.domain = X;
  g.h = h;

  // interior lattice anchored at the lower-left corner
  const double eps = 1e-9 * h;
  g.nx = static_cast<int>(std::floor((X.width() - eps) / h));
  if (X.x0 + g.nx * h >= X.x1 - eps) --g.nx;
  g.ny = static_cast<int>(std::floor((X.height() - eps) / h));
  if (X.y0 + g.ny * h >= X.y1 - eps) --g.ny;
  g.ox = X.x0 + h;
  g.oy = X.y0 + h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      g.pos.emplace_back(g.ox + i * h, g.oy + j * h);
      g.kind.push_back(NodeKind::Interior);
    }
  g.n_interior = static_cast<int>(g.pos.size());

  // boundary points, ccw from the lower-left corner; each side includes its
  // start corner and excludes its end corner
  const Vec2 corners[4] = {{X.x0, X.y0}, {X.x1, X.y0}, {X.x1, X.y1}, {X.x0, X.y1}};
  for (int s = 0; s < 4; ++s) {
    const Vec2 a = corners[s];
    const Vec2 b = corners[(s + 1) % 4];
    const double L = (b - a).norm();
    const int n = side_point_count(L, h);
    g.boundary_side_start_.push_back(static_cast<int>(g.pos.size()));
    g.boundary_side_count_.push_back(n);
    for (int k = 0; k < n; ++k) {
      g.pos.push_back(a + (static_cast<double>(k) / n) * (b - a));
      g.kind.push_back(NodeKind::Boundary);
    }
  }

  // bucket grid
  g.bcell_ = h;
  g.bnx_ = std::max(1, static_cast<int>(std::ceil(X.width() / g.bcell_)));
  g.bny_ = std::max(1, static_cast<int>(std::ceil(X.height() / g.bcell_)));
  g.buckets_.assign(static_cast<std::size_t>(g.bnx_) * g.bny_, {});
  for (int id = 0; id < g.size(); ++id) g.buckets_[g.bucket_of(g.pos[id])].push_back(id);

  // Voronoi cell areas.  Every cell lies in a ball of radius h around its node
  // (resolution property), so only neighbours within 2h can contribute edges.
  g.area.resize(g.pos.size());
  const Polygon dom = X.polygon();
  for (int id = 0; id < g.size(); ++id) {
    Polygon cell = dom;
    for (int j : g.nodes_within(g.pos[id], 2 * h + 1e-9)) {
      if (j == id) continue;
      const Vec2 n = g.pos[j] - g.pos[id];
      const double c = n.dot(0.5 * (g.pos[j] + g.pos[id]));
      cell = clip_halfplane(cell, n, c);
      if (cell.empty()) break;
    }
    g.area[id] = polygon_area(cell);
  }
  return g;
}

double voronoi_area(const Grid& grid, int node) {
  if (node < 0 || node >= grid.size()) throw std::out_of_range("unknown node");
  return grid.area[node];
}

double nn_extension(const GridFunction& u, const Vec2& x) {
  const Grid& g = *u.grid;
  const int nearest = g.nearest_node(x);
  const double d = (g.pos[nearest] - x).norm();
  double v = u[nearest];
  for (int id : g.nodes_within(x, d + 1e-12))
    if ((g.pos[id] - x).norm() <= d + 1e-12) v = std::max(v, u[id]);
  return v;
}

namespace {

void write_row(std::ostream& os, const Grid& g, int i, const double* value) {
  char buf[200];
  if (value)
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%s,%.17g,%.17g\n", i, g.pos[i].x(),
                  g.pos[i].y(), g.interior(i) ? "interior" : "boundary", g.area[i], *value);
  else
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%s,%.17g\n", i, g.pos[i].x(), g.pos[i].y(),
                  g.interior(i) ? "interior" : "boundary", g.area[i]);
  os << buf;
}

}  // namespace

void write_grid_csv(const Grid& g, std::ostream& os) {
  os << "node,x,y,kind,area\n";
  for (int i = 0; i < g.size(); ++i) write_row(os, g, i, nullptr);
}

void write_grid_function_csv(const GridFunction& u, std::ostream& os) {
  const Grid& g = *u.grid;
  os << "node,x,y,kind,area,value\n";
  for (int i = 0; i < g.size(); ++i) {
    const double v = u[i];
    write_row(os, g, i, &v);
  }
}

}  // namespace mot
