#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fogalloc/oracle.hpp"
#include "fogalloc/scenario.hpp"

namespace fogalloc {

/// Throttle samples are drawn in fixed-size blocks, each from its own derived
/// stream, so serial and parallel runs produce identical results.
struct McOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t block = 4096;
  Execution exec = Execution::parallel;
};

/// Fraction of throttle draws for which `bits` cycles finish within `window`
/// at nominal frequency `freq`. One for zero bits.
double deadline_success_rate(double bits, double freq, double window, const ThrottleModel& model,
                             double cycles_per_bit, const McOptions& opts);

/// Per-device empirical probability of meeting the deadline.
std::vector<double> success_rates(const Allocation& a, const Scenario& s, const McOptions& opts);

/// Sample mean of the realized energy; converges to expected_total_energy.
double mean_realized_energy(const Allocation& a, const Scenario& s, const McOptions& opts);

/// Compensated (Neumaier) sum.
class KahanSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace fogalloc
