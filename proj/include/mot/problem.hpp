#pragma once

#include <functional>
#include <string>

#include "mot/geometry.hpp"
#include "mot/grid.hpp"

namespace mot {

/// Closed-form density evaluator with a user-declared Lipschitz constant.
struct Density {
  std::function<double(const Vec2&)> eval;
  double lipschitz = 0;

  double operator()(const Vec2& p) const { return eval(p); }
};

struct DensityPair {
  Density f;  // source, on the closure of X
  Density g;  // target, on the plane
  double mass_f = 0;
  double mass_g = 0;
  double factor = 1;  // multiplicative rescaling applied to f
};

/// Composite midpoint quadrature over a rectangle at resolution `res`.
double integrate_rect(const Rect& X, const std::function<double(const Vec2&)>& fn, double res);

/// Integral over the target set (polygon triangulation, or refined polar grid
/// for a disc).
double integrate_target(const ConvexTarget& Y, const std::function<double(const Vec2&)>& fn,
                        double rel_tol = 1e-10);

/// Rescales f so that the masses agree to 1e-8 relative; masses computed by
/// composite midpoint quadrature at resolution h/4.
DensityPair mass_balance_normalise(DensityPair dp, const Rect& X, const ConvexTarget& Y,
                                   double h);

struct ManufacturedCase {
  std::string name;
  Rect X;
  ConvexTarget Y;
  DensityPair dp;
  std::function<double(const Vec2&)> exact_potential;  // up to an additive constant
  std::function<Vec2(const Vec2&)> exact_map;          // grad of the potential
};

/// name in {identity, anisotropic, separable-quartic}
ManufacturedCase make_case(const std::string& name);

}  // namespace mot
