#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "mot/common.hpp"

namespace mot {

// Convex polygon, counterclockwise vertex order.
using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly);
Vec2 polygon_centroid(const Polygon& poly);
bool is_strictly_convex_ccw(const Polygon& poly, double tol = 1e-12);
bool polygon_contains(const Polygon& poly, const Vec2& p, double tol = 1e-12);

/// Clips `poly` against the half-plane {p : n.dot(p) <= c}.
Polygon clip_halfplane(const Polygon& poly, const Vec2& n, double c);

void write_polygon_csv(const Polygon& poly, std::ostream& os);

/// Convex target set Y, either a strictly convex ccw polygon or a disc,
/// together with the constants the transport-constraint scheme consumes.
struct ConvexTarget {
  Polygon poly;          // empty when disc
  Vec2 center{0, 0};     // disc only
  double radius = 0;     // disc only
  bool disc = false;

  double lipschitz = 1.0;  // L_H, 1 for the signed distance function
  double inner_diam = 0;   // D = sqrt(2) * inradius
  double r_max = 0;        // max_{y in bd Y} |y|
  int sample_count = 1;    // M = ceil(2 r_max / D)

  static ConvexTarget make_polygon(Polygon p);
  static ConvexTarget make_disc(const Vec2& c, double r);
  static ConvexTarget make_rect(double x0, double x1, double y0, double y1);

  double signed_distance(const Vec2& p) const;
  double inradius() const;
  bool contains(const Vec2& p, double tol = 1e-12) const;
};

/// Defining function H for Y: the Euclidean signed distance, negative inside.
double signed_distance(const ConvexTarget& Y, const Vec2& p);

/// Inner-diameter surrogate D = sqrt(2) * inradius(Y).
double inner_diameter(const ConvexTarget& Y);

/// Subdifferential of a piecewise-linear convex grid function at a node:
/// a convex polygon in slope space (possibly degenerate, then area 0).
struct SubgradientPolytope {
  Polygon vertices;
  double area = 0;
};

/// Computes {p : vals[j] >= vals[i] + p.dot(pts[j]-pts[i]) for all j} by
/// incremental half-plane clipping, seeded with the box [-box,box]^2.
SubgradientPolytope subgradient_polytope_at(std::span<const Vec2> pts,
                                            std::span<const double> vals, int i,
                                            double box_halfwidth);

/// Integral of `g` over the polytope by centroid-fan triangulation and a
/// degree-2 rule, refined until successive estimates agree to 1e-10 relative.
double integrate_density_over_polytope(const SubgradientPolytope& P,
                                       const std::function<double(const Vec2&)>& g);

double integrate_polygon(const Polygon& poly,
                         const std::function<double(const Vec2&)>& g,
                         double rel_tol = 1e-10);

/// Values of the largest convex function lying at or below the data at every
/// point: the lower convex hull of the lifted point set (x, y, value).
/// Throws if the points span fewer than 2 dimensions.
std::vector<double> lower_convex_envelope(std::span<const Vec2> pts,
                                          std::span<const double> vals);

}  // namespace mot
