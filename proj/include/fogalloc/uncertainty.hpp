#pragma once

#include <cstddef>
#include <vector>

#include "fogalloc/rng.hpp"
#include "fogalloc/types.hpp"

namespace fogalloc {

/// Law of the CPU throttling factor xi; the realized frequency is (1 - xi) f.
/// Only the uniform family is built in.
class ThrottleModel {
 public:
  enum class Kind { uniform };

  static ThrottleModel uniform(double lo, double hi);

  Kind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double cdf(double x) const;
  /// x with cdf(x) = gamma, gamma in (0, 1).
  double inv_cdf(double gamma) const;
  double mean() const;
  double second_moment() const;
  /// E[(1 - xi)^2].
  double eta() const;
  double sample(Rng& rng) const;

  friend bool operator==(const ThrottleModel&, const ThrottleModel&) = default;

 private:
  ThrottleModel(Kind kind, double lo, double hi) : kind_(kind), lo_(lo), hi_(hi) {}

  Kind kind_;
  double lo_;
  double hi_;
};

// Free-function forms of the accessors.
double inv_cdf(const ThrottleModel& model, double gamma);
double eta(const ThrottleModel& model);
ThrottleModel::Kind kind(const ThrottleModel& model);

/// t_max (1 - F^{-1}(gamma)) / c: the largest bits-per-hertz ratio that still
/// meets the deadline with probability gamma.
double q_constant(const ThrottleModel& model, const TaskSpec& task, double gamma);

/// Per-device constants of the deterministic deadline constraints.
struct ChanceConstants {
  double gamma = 0.0;
  std::vector<double> inv_cdf_gamma;
  std::vector<double> eta;
  std::vector<double> q;

  static ChanceConstants build(const std::vector<ThrottleModel>& models, const TaskSpec& task,
                               double gamma);

  std::size_t num_devices() const { return eta.size(); }
};

/// (f0 t_max - b0 c) / (f0 t_max) - F^{-1}(gamma) for the active device.
/// Nonnegative iff P(local completion <= t_max) >= gamma. f0 = 0 with b0 > 0
/// yields -inf.
double deterministic_margin_local(double b0, double f0, const ChanceConstants& k,
                                  const TaskSpec& task);

/// Same for offloader `device` (1..J) whose compute window is t_max - t_up.
/// t_up >= t_max with bj > 0, or fj = 0 with bj > 0, yields -inf.
double deterministic_margin_offload(std::size_t device, double bj, double fj, double t_up,
                                    const ChanceConstants& k, const TaskSpec& task);

/// Smallest frequency that meets the deadline with probability gamma when
/// `bits` must finish within `window` seconds: bits c / (window (1 - F^{-1})).
/// Zero for zero bits; +inf for a nonpositive window with bits > 0.
double min_frequency(double bits, double window, double inv_cdf_gamma, double cycles_per_bit);

/// Largest portion an offloader running at `f_max` can take when it first
/// uploads at `rate`: f R T (1 - F^{-1}) / (R c + f (1 - F^{-1})).
double offload_capacity(double f_max, double rate, double inv_cdf_gamma, const TaskSpec& task);

void validate_gamma(double gamma);

}  // namespace fogalloc
