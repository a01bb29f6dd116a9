#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fogalloc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  std::uint64_t seed = 20240601;
  int jobs = 0;  // 0: all available threads
};

/// Invariant suite behind `fogalloc validate`: DCF identities, chance
/// constraint equivalence against Monte Carlo, frequency closed form, DC
/// descent, oracle comparisons, end-to-end feasibility and serial/parallel
/// agreement. Sample counts are smaller than the acceptance suite's.
std::vector<CheckResult> run_validation(const ValidationOptions& opts = {});

/// One line per check followed by a totals line.
void print_checks(const std::vector<CheckResult>& checks, std::ostream& out);

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace fogalloc
