#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace fogalloc {

/// Smooth function on R^n. Returns f(x); when `grad` is non-empty it has
/// length n and receives the full gradient.
using SmoothFn = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// min f0(x) s.t. g_k(x) <= 0, A x = d, lower <= x <= upper, with f0 and g_k
/// convex. A bound pair with lower == upper fixes that variable.
struct ConvexProgram {
  std::size_t dim = 0;
  SmoothFn objective;
  std::vector<SmoothFn> inequalities;
  std::vector<std::vector<double>> eq_rows;  // each of length dim
  std::vector<double> eq_rhs;
  std::vector<double> lower;  // empty = unbounded; entries may be -inf
  std::vector<double> upper;  // empty = unbounded; entries may be +inf
  std::vector<double> scale;  // characteristic magnitudes; empty = all 1

  void add_equality(std::vector<double> row, double rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }
};

struct SolverOptions {
  double tol = 1e-6;          // KKT residual accepted as converged
  double feas_tol = 1e-8;     // scaled inequality slack accepted at the end
  double mu0 = 1.0;
  double mu_factor = 10.0;
  double gap_tol = 1e-9;      // stop once (#barrier terms) * mu < gap_tol
  double newton_tol = 1e-12;  // half squared Newton decrement ending a centering step
  int max_newton_iters = 600;
  double ls_alpha = 0.3;
  double ls_beta = 0.8;
  double fd_step = 1e-6;      // relative, in scaled coordinates

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

enum class SolverStatus { converged, max_iter, infeasible, line_search_failed };

std::string_view to_string(SolverStatus s);

struct SolverResult {
  std::vector<double> x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double kkt_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;  // Newton steps, phase 1 included
  SolverStatus status = SolverStatus::infeasible;
  std::vector<double> stage_objectives;  // f0 after each centering
  int gradient_fallbacks = 0;
};

/// Log-barrier interior-point method with damped Newton steps. Hessians come
/// from central differences of gradients in scaled coordinates. If `x0` is
/// not strictly feasible a phase-1 search runs first. Never returns a point
/// with a larger objective than a strictly feasible `x0`.
SolverResult minimize(const ConvexProgram& prog, std::span<const double> x0,
                      const SolverOptions& opts = {});

struct Phase1Result {
  std::vector<double> x;
  bool feasible = false;
  double slack = std::numeric_limits<double>::infinity();  // max scaled violation at exit
  int iterations = 0;
};

/// Strictly feasible point via min s s.t. g_k(x) <= s and scaled bound
/// violations <= s. `guess` may be infeasible; equalities are restored by
/// projection. `feasible == false` certifies (to tolerance) an empty interior.
Phase1Result phase1_start(const ConvexProgram& prog, std::span<const double> guess,
                          const SolverOptions& opts = {});

/// True when x satisfies bounds and inequalities strictly and equalities to
/// `eq_tol` (relative).
bool strictly_feasible(const ConvexProgram& prog, std::span<const double> x,
                       double eq_tol = 1e-9);

}  // namespace fogalloc
