#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fogalloc/model.hpp"
#include "fogalloc/types.hpp"

namespace fogalloc {

enum class Method { local, dc, two_step, oracle };

std::string_view to_string(Method m);
/// Accepts "local", "dc", "two-step", "oracle".
Method method_from_string(std::string_view name);

/// Device cap repaired by the two-step method.
struct RepairEvent {
  std::size_t device = 0;    // 1..J
  double f_star = 0.0;       // frequency before clamping, Hz
  double b_plus = 0.0;       // bits kept on the device
  double remaining_b = 0.0;  // bits left for the re-solve
  double remaining_pmax = 0.0;
};

/// Per-iteration record of the DC method.
struct DcTrace {
  std::vector<Allocation> iterates;
  std::vector<double> h_values;  // penalized objective, J
  std::vector<std::string> subproblem_statuses;
  double wall_time_s = 0.0;
  bool converged = false;
  bool stalled = false;
};

struct SolveReport {
  Method method = Method::local;
  Allocation allocation;
  double energy_j = std::numeric_limits<double>::quiet_NaN();
  FeasibilityReport feasibility;
  int iterations = 0;  // DC: outer iterations; two-step: P2 solves
  bool converged = true;
  double wall_time_s = 0.0;
  std::vector<RepairEvent> repairs;
  DcTrace trace;  // empty unless method == dc
};

}  // namespace fogalloc
