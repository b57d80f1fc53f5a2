#include "mot/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace mot {

double polygon_area(const Polygon& poly) {
  if (poly.size() < 3) return 0.0;
  double s = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    s += cross2(a, b);
  }
  return 0.5 * s;
}

Vec2 polygon_centroid(const Polygon& poly) {
  if (poly.empty()) return Vec2::Zero();
  const double a = polygon_area(poly);
  if (a < 1e-300) {
    // degenerate: average of vertices
    Vec2 c = Vec2::Zero();
    for (const Vec2& v : poly) c += v;
    return c / static_cast<double>(poly.size());
  }
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    c += (p + q) * cross2(p, q);
  }
  return c / (6.0 * a);
}

bool is_strictly_convex_ccw(const Polygon& poly, double tol) {
  if (poly.size() < 3) return false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2& c = poly[(i + 2) % n];
    if (cross2(b - a, c - b) <= tol) return false;
  }
  return true;
}

bool polygon_contains(const Polygon& poly, const Vec2& p, double tol) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (cross2(b - a, p - a) < -tol) return false;
  }
  return true;
}

Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double c) {
  Polygon out;
  const std::size_t m = poly.size();
  if (m == 0) return out;
  out.reserve(m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    const double dp = n.dot(p) - c;
    const double dq = n.dot(q) - c;
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

void write_polygon_csv(const Polygon& poly, std::ostream& os) {
  char buf[80];
  for (const Vec2& v : poly) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.x(), v.y());
    os << buf;
  }
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 < 1e-300) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

}  // namespace

ConvexTarget ConvexTarget::make_polygon(Polygon p) {
  if (!is_strictly_convex_ccw(p))
    throw std::invalid_argument("target polygon must be strictly convex, counterclockwise");
  ConvexTarget t;
  t.poly = std::move(p);
  double rmax = 0;
  for (const Vec2& v : t.poly) rmax = std::max(rmax, v.norm());
  t.r_max = rmax;
  const double ri = t.inradius();
  if (ri <= 1e-12) throw std::invalid_argument("target has empty interior");
  t.inner_diam = std::sqrt(2.0) * ri;
  t.sample_count = static_cast<int>(std::ceil(2.0 * t.r_max / t.inner_diam));
  t.sample_count = std::max(t.sample_count, 1);
  return t;
}

ConvexTarget ConvexTarget::make_disc(const Vec2& c, double r) {
  if (r <= 0) throw std::invalid_argument("target has empty interior");
  ConvexTarget t;
  t.disc = true;
  t.center = c;
  t.radius = r;
  t.r_max = c.norm() + r;
  t.inner_diam = std::sqrt(2.0) * r;
  t.sample_count = std::max(1, static_cast<int>(std::ceil(2.0 * t.r_max / t.inner_diam)));
  return t;
}

ConvexTarget ConvexTarget::make_rect(double x0, double x1, double y0, double y1) {
  return make_polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

double ConvexTarget::signed_distance(const Vec2& p) const {
  if (disc) return (p - center).norm() - radius;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  }
  return polygon_contains(poly, p) ? -d : d;
}

double ConvexTarget::inradius() const {
  if (disc) return radius;
  // LP: max r s.t. n_i . x + r <= b_i for every edge.  The optimum has three
  // active edges; enumerate the triples.
  const std::size_t m = poly.size();
  std::vector<Vec2> nrm(m);
  std::vector<double> off(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 d = poly[(i + 1) % m] - poly[i];
    Vec2 n(d.y(), -d.x());  // outward for ccw
    n.normalize();
    nrm[i] = n;
    off[i] = n.dot(poly[i]);
  }
  double best = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        Eigen::Matrix3d A;
        A << nrm[i].x(), nrm[i].y(), 1, nrm[j].x(), nrm[j].y(), 1, nrm[k].x(), nrm[k].y(), 1;
        if (std::abs(A.determinant()) < 1e-14) continue;
        const Vec3 sol = A.fullPivLu().solve(Vec3(off[i], off[j], off[k]));
        const Vec2 x(sol[0], sol[1]);
        const double r = sol[2];
        if (r <= best) continue;
        bool feasible = true;
        for (std::size_t l = 0; l < m && feasible; ++l)
          feasible = nrm[l].dot(x) + r <= off[l] + 1e-10;
        if (feasible) best = r;
      }
  return best;
}

bool ConvexTarget::contains(const Vec2& p, double tol) const {
  return signed_distance(p) <= tol;
}

double signed_distance(const ConvexTarget& Y, const Vec2& p) { return Y.signed_distance(p); }

double inner_diameter(const ConvexTarget& Y) {
  if (Y.inner_diam <= 0) throw std::invalid_argument("target has empty interior");
  return Y.inner_diam;
}

SubgradientPolytope subgradient_polytope_at(std::span<const Vec2> pts,
                                            std::span<const double> vals, int i,
                                            double box_halfwidth) {
  const double B = box_halfwidth;
  Polygon poly{{-B, -B}, {B, -B}, {B, B}, {-B, B}};
  const Vec2 xi = pts[i];
  const double vi = vals[i];
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    const Vec2 d = pts[j] - xi;
    if (d.squaredNorm() < 1e-28) continue;
    poly = clip_halfplane(poly, d, vals[j] - vi);
    if (poly.empty()) break;
  }
  SubgradientPolytope out;
  out.vertices = std::move(poly);
  out.area = polygon_area(out.vertices);
  if (out.area < 0) out.area = 0;
  return out;
}

namespace {

double integrate_triangle(const Vec2& a, const Vec2& b, const Vec2& c,
                          const std::function<double(const Vec2&)>& g, int depth,
                          double area, double coarse, double rel_tol) {
  // degree-2 rule on the edge midpoints
  const Vec2 mab = 0.5 * (a + b), mbc = 0.5 * (b + c), mca = 0.5 * (c + a);
  const double fine = area / 3.0 * (g(mab) + g(mbc) + g(mca));
  if (depth > 0 &&
      std::abs(fine - coarse) > rel_tol * std::max(std::abs(fine), area) && depth < 14) {
    // recurse on the 4 children
    const double qa = area / 4.0;
    double s = 0;
    s += integrate_triangle(a, mab, mca, g, depth + 1, qa, fine / 4.0, rel_tol);
    s += integrate_triangle(mab, b, mbc, g, depth + 1, qa, fine / 4.0, rel_tol);
    s += integrate_triangle(mca, mbc, c, g, depth + 1, qa, fine / 4.0, rel_tol);
    s += integrate_triangle(mab, mbc, mca, g, depth + 1, qa, fine / 4.0, rel_tol);
    return s;
  }
  if (depth == 0) {
    const double qa = area / 4.0;
    double s = 0;
    s += integrate_triangle(a, mab, mca, g, 1, qa, fine / 4.0, rel_tol);
    s += integrate_triangle(mab, b, mbc, g, 1, qa, fine / 4.0, rel_tol);
    s += integrate_triangle(mca, mbc, c, g, 1, qa, fine / 4.0, rel_tol);
    s += integrate_triangle(mab, mbc, mca, g, 1, qa, fine / 4.0, rel_tol);
    return s;
  }
  return fine;
}

}  // namespace

double integrate_polygon(const Polygon& poly, const std::function<double(const Vec2&)>& g,
                         double rel_tol) {
  if (poly.size() < 3) return 0.0;
  const Vec2 c = polygon_centroid(poly);
  double total = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const double area = 0.5 * cross2(a - c, b - c);
    if (std::abs(area) < 1e-300) continue;
    total += integrate_triangle(c, a, b, g, 0, area, 0.0, rel_tol);
  }
  return total;
}

double integrate_density_over_polytope(const SubgradientPolytope& P,
                                       const std::function<double(const Vec2&)>& g) {
  if (P.area <= 0) return 0.0;
  return integrate_polygon(P.vertices, g);
}

// ---------------------------------------------------------------------------
// Lower convex envelope via an incremental 3D convex hull of the lifted points.
// ---------------------------------------------------------------------------

namespace {

struct HullFace {
  int a, b, c;
  Vec3 n;       // outward normal
  double off;   // n . p <= off for all hull points
  bool alive = true;
};

constexpr double kHullEps = 1e-10;

class IncrementalHull {
 public:
  explicit IncrementalHull(const std::vector<Vec3>& pts) : pts_(pts) { build(); }

  const std::vector<HullFace>& faces() const { return faces_; }
  bool planar() const { return planar_; }
  Vec3 plane_normal() const { return plane_n_; }
  double plane_off() const { return plane_off_; }

 private:
  void add_face(int a, int b, int c) {
    HullFace f;
    f.a = a;
    f.b = b;
    f.c = c;
    f.n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    f.off = f.n.dot(pts_[a]);
    const int id = static_cast<int>(faces_.size());
    faces_.push_back(f);
    edge_[{a, b}] = id;
    edge_[{b, c}] = id;
    edge_[{c, a}] = id;
  }

  void build() {
    const int n = static_cast<int>(pts_.size());
    if (n < 3) throw std::invalid_argument("fewer than 3 affinely independent nodes");
    // extreme initial simplex
    int i0 = 0;
    for (int i = 1; i < n; ++i)
      if (std::lexicographical_compare(pts_[i].data(), pts_[i].data() + 3,
                                       pts_[i0].data(), pts_[i0].data() + 3))
        i0 = i;
    int i1 = -1;
    double best = 0;
    for (int i = 0; i < n; ++i) {
      const double d = (pts_[i] - pts_[i0]).squaredNorm();
      if (d > best) { best = d; i1 = i; }
    }
    if (i1 < 0 || best < 1e-24)
      throw std::invalid_argument("fewer than 3 affinely independent nodes");
    int i2 = -1;
    best = 0;
    for (int i = 0; i < n; ++i) {
      const double d = (pts_[i] - pts_[i0]).cross(pts_[i1] - pts_[i0]).squaredNorm();
      if (d > best) { best = d; i2 = i; }
    }
    if (i2 < 0 || best < 1e-24)
      throw std::invalid_argument("fewer than 3 affinely independent nodes");
    const Vec3 nrm = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]);
    int i3 = -1;
    best = 0;
    for (int i = 0; i < n; ++i) {
      const double d = std::abs(nrm.dot(pts_[i] - pts_[i0]));
      if (d > best) { best = d; i3 = i; }
    }
    if (i3 < 0 || best < kHullEps * nrm.norm()) {
      planar_ = true;
      plane_n_ = nrm.normalized();
      plane_off_ = plane_n_.dot(pts_[i0]);
      return;
    }
    // orient: i3 below/above face (i0,i1,i2)
    if (nrm.dot(pts_[i3] - pts_[i0]) > 0) std::swap(i1, i2);
    add_face(i0, i1, i2);
    add_face(i0, i2, i3);
    add_face(i2, i1, i3);
    add_face(i1, i0, i3);

    for (int i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      insert(i);
    }
  }

  void insert(int p) {
    const Vec3& x = pts_[p];
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      if (!faces_[f].alive) continue;
      if (faces_[f].n.dot(x) > faces_[f].off + kHullEps * faces_[f].n.norm()) visible.push_back(f);
    }
    if (visible.empty()) return;
    std::vector<char> isvis(faces_.size(), 0);
    for (int f : visible) isvis[f] = 1;
    // horizon edges: directed edges of visible faces whose twin face survives
    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const HullFace& fc = faces_[f];
      const int vs[3][2] = {{fc.a, fc.b}, {fc.b, fc.c}, {fc.c, fc.a}};
      for (const auto& e : vs) {
        auto it = edge_.find({e[1], e[0]});
        if (it == edge_.end() || !isvis[it->second]) horizon.emplace_back(e[0], e[1]);
      }
    }
    for (int f : visible) {
      faces_[f].alive = false;
      edge_.erase({faces_[f].a, faces_[f].b});
      edge_.erase({faces_[f].b, faces_[f].c});
      edge_.erase({faces_[f].c, faces_[f].a});
    }
    for (const auto& [a, b] : horizon) add_face(a, b, p);
  }

  const std::vector<Vec3>& pts_;
  std::vector<HullFace> faces_;
  std::map<std::pair<int, int>, int> edge_;
  bool planar_ = false;
  Vec3 plane_n_ = Vec3::Zero();
  double plane_off_ = 0;
};

}  // namespace

std::vector<double> lower_convex_envelope(std::span<const Vec2> pts,
                                          std::span<const double> vals) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw std::invalid_argument("fewer than 3 affinely independent nodes");
  // normalise coordinates for hull predicates
  Vec2 lo = pts[0], hi = pts[0];
  double vlo = vals[0], vhi = vals[0];
  for (int i = 0; i < n; ++i) {
    lo = lo.cwiseMin(pts[i]);
    hi = hi.cwiseMax(pts[i]);
    vlo = std::min(vlo, vals[i]);
    vhi = std::max(vhi, vals[i]);
  }
  const double sx = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const double sv = std::max(vhi - vlo, 1e-12);
  const Vec2 c = 0.5 * (lo + hi);
  const double cv = 0.5 * (vlo + vhi);

  std::vector<Vec3> lifted(n);
  for (int i = 0; i < n; ++i)
    lifted[i] = Vec3((pts[i].x() - c.x()) / sx, (pts[i].y() - c.y()) / sx,
                     (vals[i] - cv) / sv);

  IncrementalHull hull(lifted);
  std::vector<double> env(n);
  if (hull.planar()) {
    const Vec3 pn = hull.plane_normal();
    if (std::abs(pn.z()) < 1e-9)
      throw std::invalid_argument("fewer than 3 affinely independent nodes");
    // all data on one plane: already convex
    for (int i = 0; i < n; ++i) env[i] = vals[i];
    return env;
  }
  // supporting-plane maximum over the lower faces
  std::vector<const HullFace*> lower;
  for (const HullFace& f : hull.faces()) {
    if (!f.alive) continue;
    if (f.n.z() < -kHullEps * f.n.norm()) lower.push_back(&f);
  }
  if (lower.empty()) throw std::runtime_error("convex envelope: no lower faces");
  for (int i = 0; i < n; ++i) {
    double e = -std::numeric_limits<double>::infinity();
    const Vec3& q = lifted[i];
    for (const HullFace* f : lower) {
      const double z = (f->off - f->n.x() * q.x() - f->n.y() * q.y()) / f->n.z();
      e = std::max(e, z);
    }
    env[i] = std::min(cv + e * sv, vals[i]);
  }
  return env;
}

}  // namespace mot
