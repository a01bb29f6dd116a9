#pragma once

#include <optional>

#include "fogalloc/convex_solver.hpp"
#include "fogalloc/dcf.hpp"
#include "fogalloc/report.hpp"
#include "fogalloc/scenario.hpp"

namespace fogalloc {

struct DcParams {
  double lambda = 12.0;
  double epsilon = 1e-2;  // J
  int k_max = 1000;
  double gamma = 0.95;
  SolverOptions solver;

  friend bool operator==(const DcParams&, const DcParams&) = default;
};

/// Default starting point: equal power split, bits split evenly but kept
/// below 90% of each offloader's capacity at that power, frequencies just
/// above the chance-constraint equality, t_up = b / R.
Allocation dc_initial_point(const Scenario& s, const ChanceConstants& k);

/// Penalized objective of an allocation at its true rates R(P_j).
double dc_penalized_value(const Allocation& a, const Scenario& s, const ChanceConstants& k,
                          double lambda);

/// DC algorithm. Each outer iteration solves the linearized convex subproblem
/// over (b, f, t, s) with powers held at their current values, then updates
/// each power by a one-dimensional search on the penalized objective. The
/// reported allocation has t_up = b / R(P) and frequencies raised where that
/// projection would break a chance constraint.
SolveReport solve_dc(const Scenario& s, const DcParams& params = {},
                     const std::optional<Allocation>& x0 = std::nullopt);

}  // namespace fogalloc
