#include "mot/solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "mot/parallel.hpp"

namespace mot {
namespace {

// empirical bound on h^2 dF/du(x), probed at the initial iterate
double probe_sensitivity(const Scheme& s, GridFunction u) {
  const Grid& g = s.grid();
  const double h2 = g.h * g.h;
  const double delta = 1e-6;
  double K = 1.0;
  int stride = std::max(1, g.n_interior / 200);
  for (int n = 0; n < g.n_interior; n += stride) {
    double f0 = s.combined(u, n);
    double saved = u[n];
    u[n] = saved + delta;
    double f1 = s.combined(u, n);
    u[n] = saved;
    K = std::max(K, h2 * (f1 - f0) / delta);
  }
  return K;
}

void append_log(SolveReport& rep, long iter, double res, double dt) {
  rep.log.push_back({iter, res, dt});
  if (rep.log.size() > 200000) {  // thin to keep the CSV bounded
    size_t w = 0;
    for (size_t r = 0; r < rep.log.size(); r += 2) rep.log[w++] = rep.log[r];
    rep.log.resize(w);
  }
}

}  // namespace

void gauss_seidel_sweep(const Scheme& s, GridFunction& u, int* warnings) {
  const Grid& g = s.grid();
  const double scale = g.h * g.h;
  const double ftol = 0.02 * s.config().tol;
  for (int n = 0; n < g.size(); ++n) {
    if (!g.interior(n)) {
      u[n] = 0.0;
      continue;
    }
    const double t0 = u[n];
    auto eval = [&](double t) {
      u[n] = t;
      return s.combined(u, n);
    };
    double f0 = eval(t0);
    if (std::abs(f0) <= ftol || !std::isfinite(f0)) {
      u[n] = t0;
      continue;
    }
    // expand a bracket on the side the root lies on (F non-decreasing in t)
    double lo = t0, hi = t0, flo = f0, fhi = f0;
    const int dir = f0 > 0 ? -1 : 1;
    double step = scale;
    bool found = false;
    for (int k = 0; k < 60; ++k) {
      double t = t0 + dir * step;
      double f = eval(t);
      if ((f0 > 0) != (f > 0) || f == 0) {
        if (f0 > 0)
          lo = t, flo = f;
        else
          hi = t, fhi = f;
        found = true;
        break;
      }
      if (f0 > 0)
        hi = t, fhi = f;
      else
        lo = t, flo = f;
      step *= 2;
    }
    if (!found) {
      u[n] = t0;
      if (warnings) ++*warnings;
      continue;
    }
    // Illinois regula falsi with bisection fallback
    double root = 0.5 * (lo + hi);
    int side = 0;
    for (int k = 0; k < 60 && hi - lo > 1e-16 * (1.0 + std::abs(t0)); ++k) {
      double t = fhi != flo ? (lo * fhi - hi * flo) / (fhi - flo) : 0.5 * (lo + hi);
      double w = hi - lo;
      t = std::min(std::max(t, lo + 1e-3 * w), hi - 1e-3 * w);
      double f = eval(t);
      if (std::abs(f) <= ftol) {
        root = t;
        side = 2;
        break;
      }
      if (f > 0) {
        hi = t, fhi = f;
        if (side == 1) flo *= 0.5;
        side = 1;
      } else {
        lo = t, flo = f;
        if (side == -1) fhi *= 0.5;
        side = -1;
      }
      root = 0.5 * (lo + hi);
    }
    u[n] = side == 2 ? root : 0.5 * (lo + hi);
  }
}

std::pair<GridFunction, SolveReport> solve(const Scheme& s) {
  const Grid& g = s.grid();
  const SchemeConfig& cfg = s.config();
  auto t_start = std::chrono::steady_clock::now();

  // strictly negative paraboloid start
  double r2max = 0;
  for (const Vec2& p : g.domain.polygon()) r2max = std::max(r2max, p.squaredNorm());
  const double eps0 = 0.5, C0 = r2max + 1.0;
  GridFunction u = sample(g, [&](const Vec2& p) { return eps0 * (p.squaredNorm() - C0); });
  for (int n = g.n_interior; n < g.size(); ++n) u[n] = 0.0;  // Dirichlet rows start exact

  const double K0 = probe_sensitivity(s, u);
  const double dt0 = g.h * g.h / K0;
  double dt = dt0;

  SolveReport rep;
  rep.dt_history.push_back({0, dt});

  GridFunction next = u, best = u, sweep_prev = u, sweep_prev2 = u;
  long sweeps = 0;
  Eigen::VectorXd F(g.size());
  double prev_res = std::numeric_limits<double>::infinity();
  double best_res = prev_res;
  int streak = 0;

  auto finish = [&](GridFunction& out, double res, bool ok) {
    rep.residual = res;
    rep.converged = ok;
    rep.u_max = out.values.maxCoeff();
    rep.u_min = out.values.minCoeff();
    rep.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  for (long iter = 0; iter <= cfg.max_iter; ++iter) {
    std::atomic<bool> bad{false};
    const int nt = std::max(1, thread_count());
    std::vector<double> chunk_max(nt, 0.0);
    const int chunk = (g.size() + nt - 1) / nt;
    parallel_for(nt, [&](int t) {
      double m = 0;
      for (int n = t * chunk; n < std::min(g.size(), (t + 1) * chunk); ++n) {
        double v = s.combined(u, n);
        if (!std::isfinite(v)) bad = true;
        F[n] = v;
        m = std::max(m, std::abs(v));
      }
      chunk_max[t] = m;
    });
    if (bad) {
      rep.iterations = iter;
      finish(best, best_res, false);
      throw SolveError("divergence", best, rep);
    }
    double res = 0;
    for (double m : chunk_max) res = std::max(res, m);
    append_log(rep, iter, res, dt);

    if (res < best_res) {
      best_res = res;
      best = u;
    }
    if (res <= cfg.tol) {
      rep.iterations = iter;
      finish(u, res, true);
      return {u, rep};
    }
    if (iter == cfg.max_iter) break;

    if (res > prev_res) {
      dt *= 0.5;
      streak = 0;
      rep.dt_history.push_back({iter, dt});
    } else if (++streak >= 50) {
      double nd = std::min(2.0 * dt, dt0);
      if (nd != dt) rep.dt_history.push_back({iter, nd});
      dt = nd;
      streak = 0;
    }
    prev_res = res;

    parallel_for(g.size(), [&](int n) { next[n] = u[n] - dt * F[n]; });
    std::swap(u, next);

    if (cfg.gs_interval > 0 && (iter + 1) % cfg.gs_interval == 0) {
      sweep_prev2 = sweep_prev;
      sweep_prev = u;
      gauss_seidel_sweep(s, u, &rep.gs_warnings);
      ++sweeps;
      // Aitken extrapolation along the sweep sequence, kept only when it
      // lowers the residual
      if (sweeps >= 3 && sweeps % 2 == 0) {
        double num = (u.values - sweep_prev.values).norm();
        double den = (sweep_prev.values - sweep_prev2.values).norm();
        if (den > 0) {
          double rho = num / den;
          if (rho > 0.2 && rho < 0.9999) {
            double theta = std::min(rho / (1.0 - rho), 200.0);
            GridFunction trial = u;
            trial.values += theta * (u.values - sweep_prev.values);
            if (s.residual(trial) < s.residual(u)) u = trial;
          }
        }
      }
      prev_res = std::numeric_limits<double>::infinity();  // residual jumps are expected
    }
  }

  rep.iterations = cfg.max_iter;
  finish(best, best_res, false);
  throw SolveError("iteration cap reached", best, rep);
}

void write_report(const SolveReport& rep, std::ostream& os) {
  char buf[128];
  os << "converged = " << (rep.converged ? "yes" : "no") << "\n";
  os << "iterations = " << rep.iterations << "\n";
  std::snprintf(buf, sizeof buf, "residual = %.17g\n", rep.residual);
  os << buf;
  std::snprintf(buf, sizeof buf, "wall_time_s = %.17g\n", rep.wall_time);
  os << buf;
  std::snprintf(buf, sizeof buf, "u_max = %.17g\n", rep.u_max);
  os << buf;
  std::snprintf(buf, sizeof buf, "u_min = %.17g\n", rep.u_min);
  os << buf;
  os << "gs_warnings = " << rep.gs_warnings << "\n";
  os << "dt_history =";
  for (const auto& c : rep.dt_history) {
    std::snprintf(buf, sizeof buf, " %ld:%.17g", c.iteration, c.dt);
    os << buf;
  }
  os << "\n";
}

void write_iteration_log_csv(const SolveReport& rep, std::ostream& os) {
  os << "iteration,residual,dt\n";
  char buf[128];
  for (const auto& r : rep.log) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", r.iteration, r.residual, r.dt);
    os << buf;
  }
}

}  // namespace mot
