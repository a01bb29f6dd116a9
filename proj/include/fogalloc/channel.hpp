#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fogalloc/rng.hpp"
#include "fogalloc/scenario.hpp"

namespace fogalloc {

/// Scenario generator parameters. Defaults are the simulation setup used in
/// the evaluation (c = 1500 cycles/bit, kappa = 1e-24, W = 10 MHz,
/// N0 = -114 dBm, P_max = 200 mW, b ~ U(2e4, 4e5), xi ~ U(0, 0.1)).
struct ScenarioConfig {
  std::size_t num_offload = 3;
  double t_max_s = 1.0;
  double cycles_per_bit = 1500.0;
  double kappa = 1e-24;
  double bandwidth_hz = 10e6;
  double noise_dbm = -114.0;
  double p_max_w = 0.2;
  double b_min_bits = 2e4;
  double b_max_bits = 4e5;
  double f_min_hz = 3e7;
  double f_max_hz = 1e8;
  double f0_max_hz = 1e10;
  double disk_radius_m = 15.0;
  double max_link_radius_m = 20.0;
  double min_distance_m = 1.0;
  double throttle_lo = 0.0;
  double throttle_hi = 0.1;

  /// Throws std::invalid_argument naming the inconsistent field.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Active device at the origin followed by J area-uniform points on the disk.
std::vector<Position> place_devices(std::size_t num_offload, double radius_m, Rng& rng);

/// 148 + 40 log10(d), d in km.
double path_loss_db(double distance_km);

/// Deterministic part 10^(-PL/10) scaled by a given fading power.
double gain_with_fading(double distance_km, double fading_power);

/// Path loss times an exponential(1) Rayleigh fading power.
double sample_gain(double distance_km, Rng& rng);

/// Pure function of (cfg, seed). The task draw and each offloader use their
/// own derived stream, so device j is identical across scenarios that differ
/// only in J or in the f_max range (common random numbers).
Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

Scenario generate_scenario(const ScenarioConfig& cfg, Rng& rng);

}  // namespace fogalloc
