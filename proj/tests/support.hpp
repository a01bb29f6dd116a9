#pragma once

// Scenario builders and hand-written reference formulas shared by the tests.
// Nothing here calls into the library's model code, so the tests compare two
// independent computations.

#include <cmath>
#include <cstdint>

#include "fogalloc/channel.hpp"
#include "fogalloc/scenario.hpp"

namespace testing {

inline fogalloc::Scenario table_one(std::uint64_t seed, std::size_t J, double t_max = 1.0,
                                    double f_max = 1e8) {
  fogalloc::ScenarioConfig c;
  c.num_offload = J;
  c.t_max_s = t_max;
  c.f_max_hz = f_max;
  return fogalloc::generate_scenario(c, seed);
}

// Fixed scenario with explicit gains and caps. Noise -114 dBm, W = 10 MHz.
inline fogalloc::Scenario fixed(double bits, double t_max, std::vector<double> gains,
                                std::vector<double> f_max) {
  fogalloc::Scenario s;
  s.task = {bits, 1500.0, t_max};
  s.radio = {10e6, std::pow(10.0, -11.4) * 1e-3, 0.2};
  s.caps.kappa = 1e-24;
  s.caps.f_max_hz = {1e10};
  s.throttle.push_back(fogalloc::ThrottleModel::uniform(0.0, 0.1));
  for (std::size_t j = 0; j < gains.size(); ++j) {
    s.gains.push_back(gains[j]);
    s.caps.f_max_hz.push_back(f_max[j]);
    s.throttle.push_back(fogalloc::ThrottleModel::uniform(0.0, 0.1));
  }
  return s;
}

// U(0, 0.1): E[(1 - xi)^2] = 1 - 2 (0.05) + 0.01 / 3, 95% quantile 0.095.
inline constexpr double kEta = 1.0 - 0.1 + 0.01 / 3.0;
inline constexpr double kQuantile95 = 0.095;

inline double shannon(double p, double g, double w, double n0) {
  return w * std::log(1.0 + p * g / n0) / std::log(2.0);
}

// kappa c eta b (b c / (T (1 - F)))^2: all bits on one device with the full window.
inline double local_energy(double bits, double c, double t_max, double kappa) {
  const double f = bits * c / (t_max * (1.0 - kQuantile95));
  return kappa * c * kEta * bits * f * f;
}

}  // namespace testing
