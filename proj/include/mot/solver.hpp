#pragma once

#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mot/operators.hpp"

namespace mot {

struct SolveReport {
  long iterations = 0;
  double residual = 0;
  double wall_time = 0;  // seconds
  double u_max = 0, u_min = 0;
  bool converged = false;
  int gs_warnings = 0;  // Gauss-Seidel bracket expansion failures

  struct DtChange {
    long iteration;
    double dt;
  };
  std::vector<DtChange> dt_history;

  struct LogRow {
    long iteration;
    double residual;
    double dt;
  };
  std::vector<LogRow> log;
};

void write_report(const SolveReport& rep, std::ostream& os);
void write_iteration_log_csv(const SolveReport& rep, std::ostream& os);

/// Thrown when the iteration cap is hit or the iterate degenerates; carries
/// the best iterate seen so far.
struct SolveError : std::runtime_error {
  SolveError(const std::string& what, GridFunction best_, SolveReport report_)
      : std::runtime_error(what), best(std::move(best_)), report(std::move(report_)) {}
  GridFunction best;
  SolveReport report;
};

/// Damped pseudo-time (Jacobi) iteration u <- u - dt F[u] from a strictly
/// negative paraboloid start, with periodic Gauss-Seidel bisection sweeps.
/// dt starts at h^2/K0 (K0 probed from the scheme), halves when the residual
/// increases and doubles (capped at the start value) after 50 decreasing steps.
std::pair<GridFunction, SolveReport> solve(const Scheme& scheme);

/// One in-order sweep replacing each u(x) by the bisection root of
/// t -> F_combined(u with u(x)=t, x); F is non-decreasing in t.  Nodes whose
/// bracket fails to expand within 60 doublings are left unchanged and counted.
void gauss_seidel_sweep(const Scheme& scheme, GridFunction& u, int* warnings = nullptr);

}  // namespace mot
