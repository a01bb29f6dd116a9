#pragma once

#include <cstddef>
#include <vector>

#include "fogalloc/convex_solver.hpp"
#include "fogalloc/report.hpp"
#include "fogalloc/scenario.hpp"
#include "fogalloc/uncertainty.hpp"

namespace fogalloc {

struct TwoStepParams {
  double alpha = 0.85;  // upload-time margin: b_j <= alpha R_j t_max
  double gamma = 0.95;
  SolverOptions solver;

  friend bool operator==(const TwoStepParams&, const TwoStepParams&) = default;
};

/// Powers and bits chosen by the power/partition step for the active set.
struct P2Solution {
  std::vector<std::size_t> devices;  // device indices 1..J, in order
  std::vector<double> power_w;       // per entry of `devices`
  double b0 = 0.0;
  std::vector<double> bits;          // per entry of `devices`
  double objective = 0.0;
  SolverStatus status = SolverStatus::converged;
};

/// Computation-energy objective of the partition step:
/// kappa (b0 c)^3 / T^2 + sum_j kappa (b_j c)^3 / (T - b_j / R_j(P_j))^2.
double p2_objective(const Scenario& s, const std::vector<std::size_t>& devices,
                    const std::vector<double>& power_w, double b0,
                    const std::vector<double>& bits);

/// Minimizes p2_objective subject to sum P <= pmax, sum b = b_current, b >= 0
/// and b_j <= alpha R_j(P_j) t_max. Throws InfeasibleError if the solver
/// cannot find an interior point.
P2Solution solve_p2(const Scenario& s, double alpha, double pmax, double b_current,
                    const std::vector<std::size_t>& devices, const SolverOptions& opts = {});

/// Frequencies meeting every chance constraint with equality; zero where the
/// portion is zero. `bits` has J+1 entries, `t_up` J entries.
std::vector<double> solve_p3(const Scenario& s, const std::vector<double>& bits,
                             const std::vector<double>& t_up, const ChanceConstants& k);

/// Largest portion device j (1..J) can finish at f_max when uploading at `rate`.
double repair_portion(std::size_t j, const Scenario& s, double rate, const ChanceConstants& k);

/// Partition step, frequency step, and cap repairs until no cap is violated.
/// Throws InfeasibleError if the active device would exceed its own cap.
SolveReport solve_two_step(const Scenario& s, const TwoStepParams& params = {});

/// Everything computed on the active device.
SolveReport local_baseline(const Scenario& s, double gamma = 0.95);

}  // namespace fogalloc
