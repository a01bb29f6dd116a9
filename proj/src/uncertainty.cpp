#include "fogalloc/uncertainty.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fogalloc {

void validate_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("reliability level gamma must lie in (0, 1), got " +
                                std::to_string(gamma));
  }
}

ThrottleModel ThrottleModel::uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw std::invalid_argument("uniform throttle needs 0 <= lo < hi <= 1");
  }
  return ThrottleModel(Kind::uniform, lo, hi);
}

double ThrottleModel::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  return (x - lo_) / (hi_ - lo_);
}

double ThrottleModel::inv_cdf(double gamma) const {
  validate_gamma(gamma);
  return lo_ + gamma * (hi_ - lo_);
}

double ThrottleModel::mean() const { return 0.5 * (lo_ + hi_); }

double ThrottleModel::second_moment() const {
  // (hi^3 - lo^3) / (3 (hi - lo)) without the cancellation.
  return (hi_ * hi_ + hi_ * lo_ + lo_ * lo_) / 3.0;
}

double ThrottleModel::eta() const { return 1.0 - 2.0 * mean() + second_moment(); }

double ThrottleModel::sample(Rng& rng) const { return fogalloc::uniform(rng, lo_, hi_); }

double inv_cdf(const ThrottleModel& model, double gamma) { return model.inv_cdf(gamma); }
double eta(const ThrottleModel& model) { return model.eta(); }
ThrottleModel::Kind kind(const ThrottleModel& model) { return model.kind(); }

double q_constant(const ThrottleModel& model, const TaskSpec& task, double gamma) {
  return task.t_max * (1.0 - model.inv_cdf(gamma)) / task.cycles_per_bit;
}

ChanceConstants ChanceConstants::build(const std::vector<ThrottleModel>& models,
                                       const TaskSpec& task, double gamma) {
  validate_gamma(gamma);
  ChanceConstants k;
  k.gamma = gamma;
  for (const auto& m : models) {
    k.inv_cdf_gamma.push_back(m.inv_cdf(gamma));
    k.eta.push_back(m.eta());
    k.q.push_back(q_constant(m, task, gamma));
  }
  return k;
}

namespace {

double margin(double bits, double freq, double window, double inv_cdf_gamma,
              double cycles_per_bit) {
  if (bits <= 0.0) return 1.0 - inv_cdf_gamma;
  if (!(freq > 0.0) || !(window > 0.0)) return -std::numeric_limits<double>::infinity();
  return 1.0 - bits * cycles_per_bit / (freq * window) - inv_cdf_gamma;
}

}  // namespace

double deterministic_margin_local(double b0, double f0, const ChanceConstants& k,
                                  const TaskSpec& task) {
  return margin(b0, f0, task.t_max, k.inv_cdf_gamma.at(0), task.cycles_per_bit);
}

double deterministic_margin_offload(std::size_t device, double bj, double fj, double t_up,
                                    const ChanceConstants& k, const TaskSpec& task) {
  if (device == 0) throw std::invalid_argument("device 0 is the active device");
  return margin(bj, fj, task.t_max - t_up, k.inv_cdf_gamma.at(device), task.cycles_per_bit);
}

double min_frequency(double bits, double window, double inv_cdf_gamma, double cycles_per_bit) {
  if (bits <= 0.0) return 0.0;
  if (!(window > 0.0)) return std::numeric_limits<double>::infinity();
  return bits * cycles_per_bit / (window * (1.0 - inv_cdf_gamma));
}

double offload_capacity(double f_max, double rate, double inv_cdf_gamma, const TaskSpec& task) {
  if (!(f_max >= 0.0) || !(rate >= 0.0)) throw std::invalid_argument("capacity needs f, R >= 0");
  const double w = 1.0 - inv_cdf_gamma;
  const double den = rate * task.cycles_per_bit + f_max * w;
  if (den == 0.0) return 0.0;
  return f_max * rate * task.t_max * w / den;
}

}  // namespace fogalloc
