#include "fogalloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fogalloc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void check_dims(const Allocation& a, const Scenario& s) {
  if (!a.consistent_with(s.num_offload())) {
    throw std::invalid_argument("allocation does not match scenario size");
  }
}

double upload_energy(const Allocation& a, const Scenario& s) {
  double total = 0.0;
  for (std::size_t j = 0; j < s.num_offload(); ++j) {
    const double bj = a.bits[j + 1];
    if (bj <= 0.0) continue;
    const double r = s.rate_to(j + 1, a.power_w[j]);
    if (!(r > 0.0)) {
      throw InfeasibleError("upload of " + std::to_string(bj) + " bits to device " +
                            std::to_string(j + 1) + " at zero rate");
    }
    total += a.power_w[j] * bj / r;
  }
  return total;
}

}  // namespace

void TaskSpec::validate() const {
  require(std::isfinite(bits) && bits > 0.0, "task size must be positive");
  require(std::isfinite(cycles_per_bit) && cycles_per_bit > 0.0, "cycles per bit must be positive");
  require(std::isfinite(t_max) && t_max > 0.0, "deadline must be positive");
}

void RadioParams::validate() const {
  require(std::isfinite(bandwidth_hz) && bandwidth_hz > 0.0, "bandwidth must be positive");
  require(std::isfinite(noise_w) && noise_w > 0.0, "noise power must be positive");
  require(finite_nonneg(p_max_w), "power budget must be nonnegative");
}

void DeviceCaps::validate() const {
  require(!f_max_hz.empty(), "device caps need at least the active device");
  for (double f : f_max_hz) require(std::isfinite(f) && f > 0.0, "f_max must be positive");
  require(std::isfinite(kappa) && kappa > 0.0, "kappa must be positive");
}

Allocation Allocation::zeros(std::size_t num_offload) {
  Allocation a;
  a.power_w.assign(num_offload, 0.0);
  a.bits.assign(num_offload + 1, 0.0);
  a.freq_hz.assign(num_offload + 1, 0.0);
  a.t_up_s.assign(num_offload, 0.0);
  return a;
}

bool Allocation::consistent_with(std::size_t num_offload) const {
  return power_w.size() == num_offload && t_up_s.size() == num_offload &&
         bits.size() == num_offload + 1 && freq_hz.size() == num_offload + 1;
}

double rate(double power_w, double gain, const RadioParams& radio) {
  if (!std::isfinite(power_w) || !std::isfinite(gain)) {
    throw std::invalid_argument("rate: non-finite power or gain");
  }
  if (power_w < 0.0 || gain <= 0.0) throw std::invalid_argument("rate: need P >= 0 and G > 0");
  return radio.bandwidth_hz * std::log2(1.0 + power_w * gain / radio.noise_w);
}

double rate_derivative(double power_w, double gain, const RadioParams& radio) {
  const double snr_per_watt = gain / radio.noise_w;
  return radio.bandwidth_hz * snr_per_watt / ((1.0 + power_w * snr_per_watt) * std::numbers::ln2);
}

double power_for_rate(double rate_bps, double gain, const RadioParams& radio) {
  return std::expm1(rate_bps / radio.bandwidth_hz * std::numbers::ln2) * radio.noise_w / gain;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

double Position::distance_m() const { return std::hypot(x_m, y_m); }

double Scenario::rate_to(std::size_t device, double power_w) const {
  return rate(power_w, gains.at(device - 1), radio);
}

void Scenario::validate() const {
  task.validate();
  radio.validate();
  caps.validate();
  const std::size_t n = num_devices();
  require(caps.f_max_hz.size() == n, "f_max list must cover every device");
  require(throttle.size() == n, "throttle list must cover every device");
  require(positions.empty() || positions.size() == n, "positions must cover every device");
  for (double g : gains) require(std::isfinite(g) && g > 0.0, "channel gains must be positive");
}

Scenario Scenario::restricted_to(const std::vector<std::size_t>& devices) const {
  Scenario out;
  out.task = task;
  out.radio = radio;
  out.caps.kappa = caps.kappa;
  out.caps.f_max_hz.push_back(caps.f_max_hz.at(0));
  out.throttle.push_back(throttle.at(0));
  if (!positions.empty()) out.positions.push_back(positions.at(0));
  for (std::size_t d : devices) {
    require(d >= 1 && d < num_devices(), "restricted_to: device index out of range");
    out.gains.push_back(gains[d - 1]);
    out.caps.f_max_hz.push_back(caps.f_max_hz[d]);
    out.throttle.push_back(throttle[d]);
    if (!positions.empty()) out.positions.push_back(positions[d]);
  }
  return out;
}

double expected_total_energy(const Allocation& a, const Scenario& s) {
  check_dims(a, s);
  double compute = 0.0;
  for (std::size_t i = 0; i < s.num_devices(); ++i) {
    compute += s.throttle[i].eta() * a.bits[i] * a.freq_hz[i] * a.freq_hz[i];
  }
  return upload_energy(a, s) + s.caps.kappa * s.task.cycles_per_bit * compute;
}

double realized_energy(const Allocation& a, const Scenario& s, std::span<const double> xi) {
  check_dims(a, s);
  if (xi.size() != s.num_devices()) throw std::invalid_argument("one throttle draw per device");
  double compute = 0.0;
  for (std::size_t i = 0; i < s.num_devices(); ++i) {
    require(xi[i] >= 0.0 && xi[i] <= 1.0, "throttle draw outside [0, 1]");
    const double f_actual = (1.0 - xi[i]) * a.freq_hz[i];
    compute += a.bits[i] * f_actual * f_actual;
  }
  return upload_energy(a, s) + s.caps.kappa * s.task.cycles_per_bit * compute;
}

std::vector<double> completion_times(const Allocation& a, const Scenario& s,
                                     std::span<const double> xi) {
  check_dims(a, s);
  if (xi.size() != s.num_devices()) throw std::invalid_argument("one throttle draw per device");
  std::vector<double> t(s.num_devices(), 0.0);
  for (std::size_t i = 0; i < s.num_devices(); ++i) {
    if (a.bits[i] <= 0.0) continue;
    const double f_actual = (1.0 - xi[i]) * a.freq_hz[i];
    if (!(f_actual > 0.0)) {
      throw std::domain_error("device " + std::to_string(i) +
                              " has a nonzero portion but zero effective frequency");
    }
    t[i] = a.bits[i] * s.task.cycles_per_bit / f_actual;
  }
  return t;
}

std::vector<double> deadline_margins(const Allocation& a, const Scenario& s, double gamma) {
  check_dims(a, s);
  const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, gamma);
  std::vector<double> m(s.num_devices());
  m[0] = deterministic_margin_local(a.bits[0], a.freq_hz[0], k, s.task);
  for (std::size_t d = 1; d < s.num_devices(); ++d) {
    m[d] = deterministic_margin_offload(d, a.bits[d], a.freq_hz[d], a.t_up_s[d - 1], k, s.task);
  }
  return m;
}

bool FeasibilityReport::feasible() const {
  auto all = [](const std::vector<bool>& v) {
    return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
  };
  return power_ok && partition_ok && nonneg_ok && all(deadline_ok) && all(coupling_ok) &&
         all(caps_ok);
}

FeasibilityReport check_feasibility(const Allocation& a, const Scenario& s, double gamma,
                                    double tol) {
  validate_gamma(gamma);
  check_dims(a, s);
  const std::size_t J = s.num_offload();
  const double b = s.task.bits;
  FeasibilityReport rep;
  double worst = 0.0;
  auto flag = [&](double violation) {
    if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
    worst = std::max(worst, violation);
    return violation <= tol;
  };

  double p_sum = 0.0;
  for (double p : a.power_w) p_sum += p;
  const double p_ref = s.radio.p_max_w > 0.0 ? s.radio.p_max_w : 1.0;
  rep.power_ok = flag(std::max(0.0, p_sum - s.radio.p_max_w) / p_ref);

  double b_sum = 0.0;
  for (double bi : a.bits) b_sum += bi;
  rep.partition_ok = flag(std::abs(b_sum - b) / b);

  double neg = 0.0;
  for (double v : a.power_w) neg = std::max(neg, -v / p_ref);
  for (double v : a.bits) neg = std::max(neg, -v / b);
  for (std::size_t i = 0; i < a.freq_hz.size(); ++i) {
    neg = std::max(neg, -a.freq_hz[i] / s.caps.f_max_hz[i]);
  }
  for (double v : a.t_up_s) neg = std::max(neg, -v / s.task.t_max);
  rep.nonneg_ok = flag(neg);

  const std::vector<double> margins = deadline_margins(a, s, gamma);
  for (double m : margins) rep.deadline_ok.push_back(flag(std::max(0.0, -m)));

  for (std::size_t j = 0; j < J; ++j) {
    const double r = s.rate_to(j + 1, std::max(0.0, a.power_w[j]));
    rep.coupling_ok.push_back(flag(std::abs(a.bits[j + 1] - r * a.t_up_s[j]) / b));
  }
  for (std::size_t i = 0; i <= J; ++i) {
    const double cap = s.caps.f_max_hz[i];
    rep.caps_ok.push_back(flag(std::max(0.0, a.freq_hz[i] - cap) / cap));
  }
  rep.worst_violation = worst;
  return rep;
}

}  // namespace fogalloc
