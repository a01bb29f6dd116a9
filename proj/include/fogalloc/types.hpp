#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fogalloc {

/// Raised when a scenario or allocation cannot be solved as posed, as opposed
/// to malformed input (std::invalid_argument).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Computation task: size in bits, CPU cycles per bit, hard deadline in seconds.
struct TaskSpec {
  double bits = 0.0;
  double cycles_per_bit = 0.0;
  double t_max = 0.0;

  void validate() const;
};

struct RadioParams {
  double bandwidth_hz = 0.0;
  double noise_w = 0.0;
  double p_max_w = 0.0;  // total transmit budget of the active device

  void validate() const;
};

/// CPU limits indexed by device: 0 is the active device, 1..J the offloaders.
struct DeviceCaps {
  std::vector<double> f_max_hz;
  double kappa = 0.0;  // effective switched capacitance, W s^3

  void validate() const;
};

/// Decision vector. Per-offloader entries (`power_w`, `t_up_s`) are indexed
/// 0..J-1 and refer to device j = index + 1; per-device entries (`bits`,
/// `freq_hz`) are indexed by device.
struct Allocation {
  std::vector<double> power_w;
  std::vector<double> bits;
  std::vector<double> freq_hz;
  std::vector<double> t_up_s;

  static Allocation zeros(std::size_t num_offload);

  std::size_t num_offload() const { return power_w.size(); }
  bool consistent_with(std::size_t num_offload) const;
};

/// Shannon rate W log2(1 + P G / N0) in bits/s.
double rate(double power_w, double gain, const RadioParams& radio);

/// dR/dP, used by the solvers.
double rate_derivative(double power_w, double gain, const RadioParams& radio);

/// Power needed to reach the given rate; inverse of `rate` in P.
double power_for_rate(double rate_bps, double gain, const RadioParams& radio);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace fogalloc
