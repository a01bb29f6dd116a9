#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fogalloc/convex_solver.hpp"
#include "fogalloc/scenario.hpp"
#include "fogalloc/uncertainty.hpp"

namespace fogalloc {

/// Index map of the DC decision vector x = [p (J), b (J+1), f (J+1), t (J), s (J)].
/// `s` are the epigraph variables of the equality penalty.
struct DcLayout {
  std::size_t num_offload = 0;

  std::size_t size() const { return 5 * num_offload + 2; }
  std::size_t p(std::size_t j) const { return j; }  // j = 0..J-1
  std::size_t b(std::size_t i) const { return num_offload + i; }  // i = 0..J
  std::size_t f(std::size_t i) const { return 2 * num_offload + 1 + i; }
  std::size_t t(std::size_t j) const { return 3 * num_offload + 2 + j; }
  std::size_t s(std::size_t j) const { return 4 * num_offload + 2 + j; }

  std::vector<double> pack(const Allocation& a) const;  // s set to 0
  Allocation unpack(std::span<const double> x) const;
};

/// Characteristic magnitudes used to balance the two convex parts of each
/// decomposition. Any positive values give exact identities.
struct DcScales {
  double bits = 1.0;
  std::vector<double> freq;  // per device
  double time = 1.0;

  static DcScales from(const Scenario& s, const ChanceConstants& k);
};

/// A function represented as y - z with y and z convex.
struct DcfPair {
  SmoothFn y;
  SmoothFn z;

  double value(std::span<const double> x) const { return y(x, {}) - z(x, {}); }
};

/// Sum over offloaders of P_j b_j / R_j as (P_j + b_j/(2R_j))^2 - (P_j^2 + b_j^2/(4R_j^2)).
DcfPair dcf_upload(const DcLayout& layout, std::vector<double> frozen_rates);

/// kappa c sum eta_i b_i f_i^2. Uses b f^2 = ((a b + f^2/a)^2 - a^2 b^2 - f^4/a^2) / 2
/// with a = F_i / sqrt(B); every a > 0 gives the same difference.
DcfPair dcf_compute_energy(const DcLayout& layout, const Scenario& s, const ChanceConstants& k,
                           const DcScales& scales);

/// b_j / R_j - t_j for offloader j (0-based), split with sigma = 1/sqrt(B R_j).
DcfPair dcf_equality(const DcLayout& layout, std::size_t j, double frozen_rate,
                     const DcScales& scales);

/// ln b0 - ln f0 - ln q0 with y = -ln f0, z = -ln b0 + ln q0.
DcfPair dcf_chance_local(const DcLayout& layout, const ChanceConstants& k);

/// (q_j / T) t_j f_j + b_j - q_j f_j for offloader j (0-based), t f split with
/// beta = sqrt(F_j / T).
DcfPair dcf_chance_offload(const DcLayout& layout, std::size_t j, const ChanceConstants& k,
                           const TaskSpec& task, const DcScales& scales);

/// Pieces of the penalized objective H_lambda = Y_lambda - Z_lambda.
struct PenalizedObjective {
  DcLayout layout;
  double lambda = 0.0;
  DcfPair upload;
  DcfPair compute;
  std::vector<DcfPair> equalities;

  /// Y + 2 lambda sum s_j (s are the epigraph variables).
  double y_lambda(std::span<const double> x, std::span<double> grad) const;
  /// Z + lambda sum (Y_eq_j + Z_eq_j).
  double z_lambda(std::span<const double> x, std::span<double> grad) const;
  /// H + lambda sum |Y_eq_j - Z_eq_j|, ignoring s.
  double value(std::span<const double> x) const;
  /// Unpenalized H.
  double energy(std::span<const double> x) const;
};

PenalizedObjective penalized_objective(const Scenario& s, const ChanceConstants& k,
                                       double lambda, const std::vector<double>& frozen_rates,
                                       const DcScales& scales);

/// x -> y(x) - z(xk) - grad z(xk) . (x - xk): convex, tangent at xk and an
/// upper bound of y - z everywhere.
SmoothFn linearize(const DcfPair& pair, std::span<const double> xk);

/// Tangent plane of a convex function at xk.
struct Tangent {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> at;

  double operator()(std::span<const double> x) const;
};

Tangent tangent(const SmoothFn& fn, std::span<const double> xk);

}  // namespace fogalloc
