#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mot/geometry.hpp"
#include "mot/grid.hpp"
#include "mot/problem.hpp"

namespace mot {

/// Integer triple (e, e', e'') with det(e, e') = 1 and e + e' + e'' = 0.
struct Superbase {
  Vec2i e, ep, epp;
};

/// All superbases with max-norm < sqrt(N), up to permutation and global sign.
std::vector<Superbase> enumerate_superbases(int N);

struct SchemeConfig {
  int N = 5;            // superbase stencil bound
  double alpha = 0.5;   // underestimation exponent, F^h = max{F1,F2,F3} - h^alpha
  double tol = 1e-8;
  long max_iter = 1'000'000;
  int gs_interval = 1;  // Gauss-Seidel accelerator sweep period in solve()
};

/// Four-case LBR determinant surrogate; symmetric, non-decreasing on a,b,c >= 0.
double lbr_G(double a, double b, double c);

/// M = ceil(2 max_{y in bd Y}|y| / D).
int compute_M(const ConvexTarget& Y);

/// Unit vectors (cos j*dt, sin j*dt), j = 0..N_theta, dt = pi/ceil(pi/sqrt(h)).
std::vector<Vec2> direction_set(double h);

/// Node at pos(node) + h*e; lattice points strictly inside are looked up
/// exactly, points on or past the boundary snap to the nearest boundary node
/// within h^{3/2}.  nullopt when the stencil leaves the domain.
std::optional<int> neighbor_node(const Grid& g, int node, const Vec2i& e);

/// Centred second difference (u(x+he)+u(x-he)-2u(x))/h^2; exact e'Ae on
/// quadratics.  Throws "stencil out of domain" when a neighbour is missing.
double second_difference(const GridFunction& u, int node, const Vec2i& e);

/// Four-point generalised second directional derivative along nu.
struct DirectionStencil {
  Vec2 nu;
  std::array<int, 4> nodes{};
  std::array<double, 4> coeff{};
  double nu_perp_residual = 0;  // attained value of the relaxed 4th moment condition

  double apply(const GridFunction& u, int center) const {
    double s = 0;
    for (int k = 0; k < 4; ++k) s += coeff[k] * (u[nodes[k]] - u[center]);
    return s;
  }
};

/// Selects one node per closed (nu, nu_perp) quadrant within sqrt(h) of the
/// center, then chooses coefficients a >= 0 with vanishing first moments and
/// unit nu-second-moment, minimising the nu_perp second moment.
/// Throws "stencil starved" when a quadrant is empty or no feasible a exists.
DirectionStencil build_direction_stencil(const Grid& g, int node, const Vec2& nu, double h);

// One-off operator evaluations (table-free; the Scheme class below caches).
double det_h(const GridFunction& u, int node, const SchemeConfig& cfg);
double g_h(const GridFunction& u, int node, const DensityPair& dp);
double f_h(const Grid& g, int node, const DensityPair& dp);
Vec2 weighted_gradient(const GridFunction& u, int node, int i, int j, int M);

/// Combined scheme with per-grid cached stencil tables.  Immutable after
/// construction; evaluations at distinct nodes may run concurrently.
class Scheme {
 public:
  Scheme(const Grid& grid, const DensityPair& dp, const ConvexTarget& Y,
         const SchemeConfig& cfg);

  const Grid& grid() const { return *grid_; }
  const DensityPair& densities() const { return *dp_; }
  const ConvexTarget& target() const { return *Y_; }
  const SchemeConfig& config() const { return cfg_; }
  int sample_count() const { return M_; }

  double F1(const GridFunction& u, int node) const;
  double F2(const GridFunction& u, int node) const;
  double F3(const GridFunction& u, int node) const;

  /// max{F1,F2,F3} - h^alpha at interior nodes, u(x) at boundary nodes.
  double combined(const GridFunction& u, int node) const;

  /// max over all nodes of |combined|.
  double residual(const GridFunction& u) const;

  double det_h(const GridFunction& u, int node) const;
  double g_h(const GridFunction& u, int node) const;
  double f_h(int node) const;
  double laplacian(const GridFunction& u, int node) const;
  Vec2 centred_gradient(const GridFunction& u, int node) const;
  Vec2 weighted_gradient(const GridFunction& u, int node, int i, int j) const;

  /// node, F1, F2, F3, argmax, combined for every node (boundary rows blank).
  void write_breakdown_csv(const GridFunction& u, std::ostream& os) const;

 private:
  struct AxisIds {
    int xp = -1, xm = -1, yp = -1, ym = -1;
    bool ok() const { return xp >= 0 && xm >= 0 && yp >= 0 && ym >= 0; }
  };
  struct SuperbaseIds {
    std::array<int, 6> id;  // +e,-e,+e',-e',+e'',-e''
  };

  const Grid* grid_;
  const DensityPair* dp_;
  const ConvexTarget* Y_;
  SchemeConfig cfg_;
  int M_;
  double halpha_;
  std::vector<AxisIds> axis_;                            // per interior node
  std::vector<std::vector<SuperbaseIds>> sb_;            // per interior node
  std::vector<std::vector<DirectionStencil>> stencils_;  // per interior node
};

/// max over all nodes of |F_combined| for a one-off evaluation.
double residual(const GridFunction& u, const DensityPair& dp, const ConvexTarget& Y,
                const SchemeConfig& cfg);

}  // namespace mot
