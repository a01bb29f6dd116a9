#pragma once

#include <cstddef>
#include <vector>

#include "fogalloc/types.hpp"
#include "fogalloc/uncertainty.hpp"

namespace fogalloc {

struct Position {
  double x_m = 0.0;
  double y_m = 0.0;

  double distance_m() const;
  friend bool operator==(const Position&, const Position&) = default;
};

/// One active device (index 0) plus J offloaders with their channels.
struct Scenario {
  TaskSpec task;
  RadioParams radio;
  DeviceCaps caps;
  std::vector<double> gains;               // linear power gain, per offloader
  std::vector<ThrottleModel> throttle;     // per device
  std::vector<Position> positions;         // per device, diagnostic only

  std::size_t num_offload() const { return gains.size(); }
  std::size_t num_devices() const { return gains.size() + 1; }

  double rate_to(std::size_t device, double power_w) const;

  /// Throws std::invalid_argument on size mismatches or non-positive gains.
  void validate() const;

  /// Copy restricted to the given offloaders (device indices 1..J, in order).
  Scenario restricted_to(const std::vector<std::size_t>& devices) const;
};

}  // namespace fogalloc
