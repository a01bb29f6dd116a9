#include "fogalloc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fogalloc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("scenario config: " + what);
}

Position draw_position(double radius_m, Rng& rng) {
  const double r = radius_m * std::sqrt(uniform01(rng));
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

void ScenarioConfig::validate() const {
  require(std::isfinite(t_max_s) && t_max_s > 0.0, "t_max_s must be positive");
  require(cycles_per_bit > 0.0, "cycles_per_bit must be positive");
  require(kappa > 0.0, "kappa must be positive");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  require(std::isfinite(noise_dbm), "noise_dbm must be finite");
  require(p_max_w >= 0.0, "p_max_w must be nonnegative");
  require(b_min_bits > 0.0 && b_min_bits <= b_max_bits, "need 0 < b_min_bits <= b_max_bits");
  require(f_min_hz > 0.0 && f_min_hz <= f_max_hz, "need 0 < f_min_hz <= f_max_hz");
  require(f0_max_hz > 0.0, "f0_max_hz must be positive");
  require(disk_radius_m > 0.0, "disk_radius_m must be positive");
  require(disk_radius_m <= max_link_radius_m,
          "disk_radius_m exceeds max_link_radius_m; devices would fall outside D2D range");
  require(min_distance_m > 0.0 && min_distance_m < disk_radius_m,
          "need 0 < min_distance_m < disk_radius_m");
  require(throttle_lo >= 0.0 && throttle_lo < throttle_hi && throttle_hi <= 1.0,
          "need 0 <= throttle_lo < throttle_hi <= 1");
}

std::vector<Position> place_devices(std::size_t num_offload, double radius_m, Rng& rng) {
  if (!(radius_m > 0.0)) throw std::invalid_argument("place_devices: radius must be positive");
  std::vector<Position> out;
  out.reserve(num_offload + 1);
  out.push_back({0.0, 0.0});
  for (std::size_t j = 0; j < num_offload; ++j) out.push_back(draw_position(radius_m, rng));
  return out;
}

double path_loss_db(double distance_km) {
  if (!(distance_km > 0.0) || !std::isfinite(distance_km)) {
    throw std::invalid_argument("path_loss_db: distance must be positive");
  }
  return 148.0 + 40.0 * std::log10(distance_km);
}

double gain_with_fading(double distance_km, double fading_power) {
  return fading_power * std::pow(10.0, -path_loss_db(distance_km) / 10.0);
}

double sample_gain(double distance_km, Rng& rng) {
  double h = exponential1(rng);
  // exponential1 can return exactly 0 once in 2^53 draws.
  if (h <= 0.0) h = 0x1.0p-53;
  return gain_with_fading(distance_km, h);
}

Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Scenario s;
  Rng task_rng = make_rng(seed, 0);
  s.task = {uniform(task_rng, cfg.b_min_bits, cfg.b_max_bits), cfg.cycles_per_bit, cfg.t_max_s};
  s.radio = {cfg.bandwidth_hz, dbm_to_watts(cfg.noise_dbm), cfg.p_max_w};
  s.caps.kappa = cfg.kappa;
  s.caps.f_max_hz.push_back(cfg.f0_max_hz);
  const ThrottleModel throttle = ThrottleModel::uniform(cfg.throttle_lo, cfg.throttle_hi);
  s.throttle.push_back(throttle);
  s.positions.push_back({0.0, 0.0});

  for (std::size_t j = 1; j <= cfg.num_offload; ++j) {
    Rng dev = make_rng(seed, j);
    const Position pos = draw_position(cfg.disk_radius_m, dev);
    const double d_m = std::max(pos.distance_m(), cfg.min_distance_m);
    const double gain = sample_gain(d_m * 1e-3, dev);
    const double f_max = uniform(dev, cfg.f_min_hz, cfg.f_max_hz);
    s.positions.push_back(pos);
    s.gains.push_back(gain);
    s.caps.f_max_hz.push_back(f_max);
    s.throttle.push_back(throttle);
  }
  return s;
}

Scenario generate_scenario(const ScenarioConfig& cfg, Rng& rng) {
  return generate_scenario(cfg, static_cast<std::uint64_t>(rng()));
}

}  // namespace fogalloc
