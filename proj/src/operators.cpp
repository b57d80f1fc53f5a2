#include "mot/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>

namespace mot {
namespace {


// canonical key of a superbase modulo permutation and global sign
std::array<int, 6> superbase_key(const Superbase& s) {
  std::array<Vec2i, 3> v{s.e, s.ep, s.epp};
  std::array<int, 6> best{};
  bool first = true;
  for (int sign : {1, -1}) {
    std::array<std::array<int, 2>, 3> w;
    for (int k = 0; k < 3; ++k) w[k] = {sign * v[k].x(), sign * v[k].y()};
    std::sort(w.begin(), w.end());
    std::array<int, 6> key{w[0][0], w[0][1], w[1][0], w[1][1], w[2][0], w[2][1]};
    if (first || key < best) best = key;
    first = false;
  }
  return best;
}

}  // namespace

std::vector<Superbase> enumerate_superbases(int N) {
  if (N < 2) throw std::invalid_argument("superbase bound must be at least 2");
  int m = 0;  // largest integer with m^2 < N
  while ((m + 1) * (m + 1) < N) ++m;

  std::vector<Superbase> out;
  std::set<std::array<int, 6>> seen;
  for (int ax = -m; ax <= m; ++ax)
    for (int ay = -m; ay <= m; ++ay)
      for (int bx = -m; bx <= m; ++bx)
        for (int by = -m; by <= m; ++by) {
          if (ax * by - ay * bx != 1) continue;
          int cx = -ax - bx, cy = -ay - by;
          if (std::abs(cx) > m || std::abs(cy) > m) continue;
          Superbase s{{ax, ay}, {bx, by}, {cx, cy}};
          if (seen.insert(superbase_key(s)).second) out.push_back(s);
        }
  return out;
}

double lbr_G(double a, double b, double c) {
  if (a >= b + c) return b * c;
  if (b >= c + a) return c * a;
  if (c >= a + b) return a * b;
  return 0.5 * (a * b + b * c + c * a) - 0.25 * (a * a + b * b + c * c);
}

int compute_M(const ConvexTarget& Y) {
  return static_cast<int>(std::ceil(2.0 * Y.r_max / Y.inner_diam));
}

std::vector<Vec2> direction_set(double h) {
  int n = static_cast<int>(std::ceil(M_PI / std::sqrt(h)));
  double dt = M_PI / n;
  std::vector<Vec2> dirs(n);
  for (int j = 0; j < n; ++j) dirs[j] = {std::cos(j * dt), std::sin(j * dt)};
  return dirs;
}

std::optional<int> neighbor_node(const Grid& g, int node, const Vec2i& e) {
  Vec2 p = g.pos[node] + g.h * Vec2(e.x(), e.y());
  if (auto id = g.node_at(p, 1e-9 * g.h)) return id;
  int b = g.nearest_boundary_node(p);
  if ((g.pos[b] - p).norm() <= std::pow(g.h, 1.5) + 1e-9) return b;
  return std::nullopt;
}

double second_difference(const GridFunction& u, int node, const Vec2i& e) {
  const Grid& g = *u.grid;
  auto ip = neighbor_node(g, node, e);
  auto im = neighbor_node(g, node, -e);
  if (!ip || !im) throw std::runtime_error("stencil out of domain");
  return (u[*ip] + u[*im] - 2.0 * u[node]) / (g.h * g.h);
}

DirectionStencil build_direction_stencil(const Grid& g, int node, const Vec2& nu, double h) {
  const Vec2 x = g.pos[node];
  const Vec2 nup(-nu.y(), nu.x());
  const double r = std::sqrt(h);

  // one node per closed quadrant of the (nu, nu_perp) axes, maximal |dhat.nu|
  std::array<int, 4> pick{-1, -1, -1, -1};
  std::array<double, 4> score{-1, -1, -1, -1};
  for (int c : g.nodes_within(x, r)) {
    if (c == node) continue;
    Vec2 d = g.pos[c] - x;
    double len = d.norm();
    if (len <= 0 || len >= r) continue;
    double s = d.dot(nu), t = d.dot(nup);
    double sc = std::abs(s) / len;
    const double tol = 1e-12;
    bool in[4] = {s >= -tol && t >= -tol, s <= tol && t >= -tol,
                  s <= tol && t <= tol, s >= -tol && t <= tol};
    for (int q = 0; q < 4; ++q)
      if (in[q] && sc > score[q]) {
        score[q] = sc;
        pick[q] = c;
      }
  }
  for (int q = 0; q < 4; ++q)
    if (pick[q] < 0) throw std::runtime_error("stencil starved");

  Eigen::Vector4d S, T;
  for (int k = 0; k < 4; ++k) {
    Vec2 d = g.pos[pick[k]] - x;
    S[k] = d.dot(nu);
    T[k] = d.dot(nup);
  }

  // a >= 0, sum a*S = 0, sum a*T = 0, (1/2) sum a*S^2 = 1, minimise
  // (1/2) sum a*T^2.  A vertex of the feasible set has at most 3 nonzeros,
  // so enumerating supports of size <= 3 finds the optimum.
  DirectionStencil st;
  st.nu = nu;
  st.nodes = pick;
  double best_cost = -1;
  std::array<double, 4> best_a{};

  auto try_support = [&](std::initializer_list<int> idx) {
    int k = static_cast<int>(idx.size());
    Eigen::MatrixXd A(3, k);
    int c = 0;
    for (int j : idx) {
      A(0, c) = S[j];
      A(1, c) = T[j];
      A(2, c) = 0.5 * S[j] * S[j];
      ++c;
    }
    Eigen::Vector3d rhs(0, 0, 1);
    Eigen::VectorXd a = A.fullPivLu().solve(rhs);
    if ((A * a - rhs).norm() > 1e-9) return;
    for (int j = 0; j < k; ++j)
      if (a[j] < -1e-12) return;
    double cost = 0;
    int c2 = 0;
    std::array<double, 4> full{};
    for (int j : idx) {
      double aj = std::max(a[c2++], 0.0);
      full[j] += aj;
      cost += 0.5 * aj * T[j] * T[j];
    }
    if (best_cost < 0 || cost < best_cost) {
      best_cost = cost;
      best_a = full;
    }
  };

  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      try_support({i, j});
      for (int k = j + 1; k < 4; ++k) try_support({i, j, k});
    }
  if (best_cost < 0) throw std::runtime_error("stencil starved");
  st.coeff = best_a;
  st.nu_perp_residual = best_cost;
  return st;
}

namespace {

struct AxisDiffs {
  double d1p, d1m, d2p, d2m;  // one-sided first differences
  double lap;                 // five-point Laplacian
};

AxisDiffs axis_diffs(const GridFunction& u, int node, int xp, int xm, int yp, int ym) {
  double h = u.grid->h;
  AxisDiffs d;
  d.d1p = (u[xp] - u[node]) / h;
  d.d1m = (u[node] - u[xm]) / h;
  d.d2p = (u[yp] - u[node]) / h;
  d.d2m = (u[node] - u[ym]) / h;
  d.lap = (d.d1p - d.d1m + d.d2p - d.d2m) / h;
  return d;
}

AxisDiffs axis_diffs_lookup(const GridFunction& u, int node) {
  const Grid& g = *u.grid;
  auto xp = neighbor_node(g, node, {1, 0}), xm = neighbor_node(g, node, {-1, 0});
  auto yp = neighbor_node(g, node, {0, 1}), ym = neighbor_node(g, node, {0, -1});
  if (!xp || !xm || !yp || !ym) throw std::runtime_error("stencil out of domain");
  return axis_diffs(u, node, *xp, *xm, *yp, *ym);
}

}  // namespace

double det_h(const GridFunction& u, int node, const SchemeConfig& cfg) {
  auto sbs = enumerate_superbases(cfg.N);
  bool any = false;
  double best = 0;
  for (const auto& s : sbs) {
    double v;
    try {
      double a = std::max(second_difference(u, node, s.e), 0.0);
      double b = std::max(second_difference(u, node, s.ep), 0.0);
      double c = std::max(second_difference(u, node, s.epp), 0.0);
      v = lbr_G(a, b, c);
    } catch (const std::runtime_error&) {
      continue;  // superbase leaves the domain
    }
    if (!any || v < best) best = v;
    any = true;
  }
  if (!any) throw std::runtime_error("empty admissible set");
  return best;
}

double g_h(const GridFunction& u, int node, const DensityPair& dp) {
  AxisDiffs d = axis_diffs_lookup(u, node);
  Vec2 grad(0.5 * (d.d1p + d.d1m), 0.5 * (d.d2p + d.d2m));
  double h = u.grid->h;
  return std::max(dp.g(grad) + h * dp.g.lipschitz * d.lap, 0.0);
}

double f_h(const Grid& g, int node, const DensityPair& dp) {
  return std::max(dp.f(g.pos[node]) - g.h * dp.f.lipschitz / std::sqrt(2.0), 0.0);
}

Vec2 weighted_gradient(const GridFunction& u, int node, int i, int j, int M) {
  AxisDiffs d = axis_diffs_lookup(u, node);
  double wi = static_cast<double>(i) / M, wj = static_cast<double>(j) / M;
  return {wi * d.d1p + (1 - wi) * d.d1m, wj * d.d2p + (1 - wj) * d.d2m};
}

Scheme::Scheme(const Grid& grid, const DensityPair& dp, const ConvexTarget& Y,
               const SchemeConfig& cfg)
    : grid_(&grid), dp_(&dp), Y_(&Y), cfg_(cfg) {
  M_ = compute_M(Y);
  halpha_ = std::pow(grid.h, cfg.alpha);

  auto sbs = enumerate_superbases(cfg.N);
  auto dirs = direction_set(grid.h);

  axis_.resize(grid.n_interior);
  sb_.resize(grid.n_interior);
  stencils_.resize(grid.n_interior);
  for (int n = 0; n < grid.n_interior; ++n) {
    auto xp = neighbor_node(grid, n, {1, 0}), xm = neighbor_node(grid, n, {-1, 0});
    auto yp = neighbor_node(grid, n, {0, 1}), ym = neighbor_node(grid, n, {0, -1});
    if (!xp || !xm || !yp || !ym) throw std::runtime_error("stencil out of domain");
    axis_[n] = {*xp, *xm, *yp, *ym};

    for (const auto& s : sbs) {
      std::array<Vec2i, 6> offs{s.e, -s.e, s.ep, -s.ep, s.epp, -s.epp};
      SuperbaseIds ids{};
      bool ok = true;
      for (int k = 0; k < 6 && ok; ++k) {
        auto id = neighbor_node(grid, n, offs[k]);
        if (id)
          ids.id[k] = *id;
        else
          ok = false;
      }
      if (ok) sb_[n].push_back(ids);
    }
    if (sb_[n].empty()) throw std::runtime_error("empty admissible set");

    for (const Vec2& nu : dirs) {
      try {
        stencils_[n].push_back(build_direction_stencil(grid, n, nu, grid.h));
      } catch (const std::runtime_error&) {
        // direction starved at this node, skip it
      }
    }
    if (stencils_[n].empty()) throw std::runtime_error("stencil starved");
  }
}

double Scheme::det_h(const GridFunction& u, int node) const {
  const double h2 = grid_->h * grid_->h;
  double best = 0;
  bool first = true;
  for (const auto& ids : sb_[node]) {
    double d[3];
    for (int k = 0; k < 3; ++k)
      d[k] = std::max((u[ids.id[2 * k]] + u[ids.id[2 * k + 1]] - 2.0 * u[node]) / h2, 0.0);
    double v = lbr_G(d[0], d[1], d[2]);
    if (first || v < best) best = v;
    first = false;
  }
  return best;
}

double Scheme::laplacian(const GridFunction& u, int node) const {
  const AxisIds& a = axis_[node];
  const double h2 = grid_->h * grid_->h;
  return (u[a.xp] + u[a.xm] + u[a.yp] + u[a.ym] - 4.0 * u[node]) / h2;
}

Vec2 Scheme::centred_gradient(const GridFunction& u, int node) const {
  const AxisIds& a = axis_[node];
  const double h = grid_->h;
  return {(u[a.xp] - u[a.xm]) / (2 * h), (u[a.yp] - u[a.ym]) / (2 * h)};
}

double Scheme::g_h(const GridFunction& u, int node) const {
  double v = dp_->g(centred_gradient(u, node)) +
             grid_->h * dp_->g.lipschitz * laplacian(u, node);
  return std::max(v, 0.0);
}

double Scheme::f_h(int node) const { return mot::f_h(*grid_, node, *dp_); }

Vec2 Scheme::weighted_gradient(const GridFunction& u, int node, int i, int j) const {
  const AxisIds& a = axis_[node];
  AxisDiffs d = axis_diffs(u, node, a.xp, a.xm, a.yp, a.ym);
  double wi = static_cast<double>(i) / M_, wj = static_cast<double>(j) / M_;
  return {wi * d.d1p + (1 - wi) * d.d1m, wj * d.d2p + (1 - wj) * d.d2m};
}

double Scheme::F1(const GridFunction& u, int node) const {
  return -g_h(u, node) * det_h(u, node) + f_h(node);
}

double Scheme::F2(const GridFunction& u, int node) const {
  double worst = 0;
  bool first = true;
  for (const auto& st : stencils_[node]) {
    double v = st.apply(u, node);
    if (first || v < worst) worst = v;
    first = false;
  }
  return -worst;
}

double Scheme::F3(const GridFunction& u, int node) const {
  const AxisIds& a = axis_[node];
  AxisDiffs d = axis_diffs(u, node, a.xp, a.xm, a.yp, a.ym);
  double best = 0;
  bool first = true;
  for (int i = 0; i <= M_; ++i) {
    double wi = static_cast<double>(i) / M_;
    double gx = wi * d.d1p + (1 - wi) * d.d1m;
    for (int j = 0; j <= M_; ++j) {
      double wj = static_cast<double>(j) / M_;
      double v = Y_->signed_distance({gx, wj * d.d2p + (1 - wj) * d.d2m});
      if (first || v < best) best = v;
      first = false;
    }
  }
  return best - grid_->h * Y_->lipschitz * d.lap;
}

double Scheme::combined(const GridFunction& u, int node) const {
  if (!grid_->interior(node)) return u[node];
  return std::max({F1(u, node), F2(u, node), F3(u, node)}) - halpha_;
}

double Scheme::residual(const GridFunction& u) const {
  double r = 0;
  for (int n = 0; n < grid_->size(); ++n) r = std::max(r, std::abs(combined(u, n)));
  return r;
}

void Scheme::write_breakdown_csv(const GridFunction& u, std::ostream& os) const {
  os << "node,x,y,F1,F2,F3,argmax,combined\n";
  char buf[256];
  for (int n = 0; n < grid_->size(); ++n) {
    const Vec2& p = grid_->pos[n];
    if (!grid_->interior(n)) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,,,,boundary,%.17g\n", n, p.x(), p.y(),
                    u[n]);
      os << buf;
      continue;
    }
    double f1 = F1(u, n), f2 = F2(u, n), f3 = F3(u, n);
    const char* arg = f1 >= f2 && f1 >= f3 ? "F1" : (f2 >= f3 ? "F2" : "F3");
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g\n", n, p.x(),
                  p.y(), f1, f2, f3, arg, std::max({f1, f2, f3}) - halpha_);
    os << buf;
  }
}

double residual(const GridFunction& u, const DensityPair& dp, const ConvexTarget& Y,
                const SchemeConfig& cfg) {
  Scheme s(*u.grid, dp, Y, cfg);
  return s.residual(u);
}

}  // namespace mot
