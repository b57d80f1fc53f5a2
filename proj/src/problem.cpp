#include "mot/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mot {

double integrate_rect(const Rect& X, const std::function<double(const Vec2&)>& fn, double res) {
  const int nx = std::max(1, static_cast<int>(std::ceil(X.width() / res)));
  const int ny = std::max(1, static_cast<int>(std::ceil(X.height() / res)));
  const double dx = X.width() / nx;
  const double dy = X.height() / ny;
  double s = 0;
  for (int j = 0; j < ny; ++j) {
    const double y = X.y0 + (j + 0.5) * dy;
    for (int i = 0; i < nx; ++i) s += fn({X.x0 + (i + 0.5) * dx, y});
  }
  return s * dx * dy;
}

namespace {

double integrate_disc(const Vec2& c, double R, const std::function<double(const Vec2&)>& fn,
                      double rel_tol) {
  double prev = 0;
  for (int n = 64;; n *= 2) {
    const int nt = 4 * n;
    const double dr = R / n;
    const double dt = 2.0 * std::numbers::pi / nt;
    double s = 0;
    for (int i = 0; i < n; ++i) {
      const double r = (i + 0.5) * dr;
      for (int j = 0; j < nt; ++j) {
        const double t = (j + 0.5) * dt;
        s += fn(c + r * Vec2(std::cos(t), std::sin(t))) * r;
      }
    }
    s *= dr * dt;
    if (n > 64 && std::abs(s - prev) <= rel_tol * std::max(std::abs(s), 1.0)) return s;
    if (n >= 4096) return s;
    prev = s;
  }
}

}  // namespace

double integrate_target(const ConvexTarget& Y, const std::function<double(const Vec2&)>& fn,
                        double rel_tol) {
  if (Y.disc) return integrate_disc(Y.center, Y.radius, fn, rel_tol);
  return integrate_polygon(Y.poly, fn, rel_tol);
}

DensityPair mass_balance_normalise(DensityPair dp, const Rect& X, const ConvexTarget& Y,
                                   double h) {
  const double mf = integrate_rect(X, [&](const Vec2& p) { return dp.f(p); }, h / 4.0);
  const double mg = integrate_target(Y, [&](const Vec2& p) { return dp.g(p); });
  if (!(mf > 1e-14) || !(mg > 1e-14)) throw std::invalid_argument("degenerate density");
  const double factor = mg / mf;
  const auto base = dp.f.eval;
  dp.f.eval = [base, factor](const Vec2& p) { return factor * base(p); };
  dp.f.lipschitz *= factor;
  dp.factor *= factor;
  dp.mass_f = mg;
  dp.mass_g = mg;
  return dp;
}

ManufacturedCase make_case(const std::string& name) {
  ManufacturedCase c;
  c.name = name;
  if (name == "identity") {
    c.X = {-1, 1, -1, 1};
    c.Y = ConvexTarget::make_rect(-1, 1, -1, 1);
    c.dp.f = {[](const Vec2&) { return 1.0; }, 0.0};
    c.dp.g = {[](const Vec2&) { return 1.0; }, 0.0};
    c.dp.mass_f = c.dp.mass_g = 4.0;
    c.exact_potential = [](const Vec2& p) { return 0.5 * p.squaredNorm(); };
    c.exact_map = [](const Vec2& p) { return p; };
  } else if (name == "anisotropic") {
    constexpr double a = 2.0, b = 0.5;
    c.X = {-1, 1, -1, 1};
    c.Y = ConvexTarget::make_rect(-a, a, -b, b);
    c.dp.f = {[](const Vec2&) { return a * b; }, 0.0};
    c.dp.g = {[](const Vec2&) { return 1.0; }, 0.0};
    c.dp.mass_f = c.dp.mass_g = 4.0 * a * b;
    c.exact_potential = [](const Vec2& p) {
      return 0.5 * (a * p.x() * p.x() + b * p.y() * p.y());
    };
    c.exact_map = [](const Vec2& p) { return Vec2(a * p.x(), b * p.y()); };
  } else if (name == "separable-quartic") {
    c.X = {-1, 1, -1, 1};
    c.Y = ConvexTarget::make_rect(-2, 2, -2, 2);
    c.dp.f = {[](const Vec2& p) {
                return (3.0 * p.x() * p.x() + 1.0) * (3.0 * p.y() * p.y() + 1.0);
              },
              24.0 * std::numbers::sqrt2};  // max |grad f| on [-1,1]^2
    c.dp.g = {[](const Vec2&) { return 1.0; }, 0.0};
    c.dp.mass_f = c.dp.mass_g = 16.0;
    c.exact_potential = [](const Vec2& p) {
      const auto w = [](double t) { return 0.25 * t * t * t * t + 0.5 * t * t; };
      return w(p.x()) + w(p.y());
    };
    c.exact_map = [](const Vec2& p) {
      return Vec2(p.x() * p.x() * p.x() + p.x(), p.y() * p.y() * p.y() + p.y());
    };
  } else {
    throw std::invalid_argument("unknown case: " + name);
  }
  return c;
}

}  // namespace mot
