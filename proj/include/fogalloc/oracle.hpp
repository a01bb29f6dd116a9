#pragma once

#include <cstddef>

#include "fogalloc/report.hpp"
#include "fogalloc/scenario.hpp"

namespace fogalloc {

struct GridSpec {
  std::size_t n_b = 201;  // points per partition axis, endpoints included
  std::size_t n_p = 101;  // points per power axis, endpoints included

  void validate() const;
};

enum class Execution { serial, parallel };

/// Exhaustive search over uniform grids of offloaded bits and powers for
/// J <= 2, with frequencies at their chance-constraint equality values. The
/// best feasible point is returned; ties go to the lexicographically first
/// grid index, so serial and parallel runs agree exactly.
SolveReport grid_search(const Scenario& s, double gamma, const GridSpec& grid,
                        Execution exec = Execution::parallel);

}  // namespace fogalloc
