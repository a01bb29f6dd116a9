#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fogalloc/scenario.hpp"

namespace fogalloc {

/// Outcome of checking an allocation against the resource-allocation
/// constraints. Violations are normalized per constraint (power by P_max,
/// bits by the task size, frequencies by their caps, margins as-is), and each
/// flag is true exactly when its normalized violation is within tolerance.
struct FeasibilityReport {
  bool power_ok = true;
  bool partition_ok = true;
  std::vector<bool> deadline_ok;  // per device
  std::vector<bool> coupling_ok;  // per offloader
  std::vector<bool> caps_ok;      // per device
  bool nonneg_ok = true;
  double worst_violation = 0.0;

  bool feasible() const;
};

/// Expected energy: upload energy plus kappa c sum eta_i b_i f_i^2. Upload
/// terms with b_j = 0 are zero regardless of power. Throws InfeasibleError if
/// b_j > 0 is uploaded at zero rate.
double expected_total_energy(const Allocation& a, const Scenario& s);

/// Energy for one throttle realization, xi indexed by device.
double realized_energy(const Allocation& a, const Scenario& s, std::span<const double> xi);

/// Local / offload computation times b_i c / ((1 - xi_i) f_i); zero when b_i = 0.
std::vector<double> completion_times(const Allocation& a, const Scenario& s,
                                     std::span<const double> xi);

/// Never throws on infeasibility. `tol` is the relative tolerance applied to
/// every normalized violation.
FeasibilityReport check_feasibility(const Allocation& a, const Scenario& s, double gamma,
                                    double tol = 1e-6);

/// Per-device deterministic deadline margins of an allocation.
std::vector<double> deadline_margins(const Allocation& a, const Scenario& s, double gamma);

}  // namespace fogalloc
