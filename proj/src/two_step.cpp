#include "fogalloc/two_step.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fogalloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// kappa (b c)^3 / w^2 with w = T - b / R(P), and its partial derivatives.
struct OffloadTerm {
  double value;
  double d_bits;
  double d_power;
};

OffloadTerm offload_term(double p, double b, double gain, const Scenario& s) {
  const double kc3 = s.caps.kappa * std::pow(s.task.cycles_per_bit, 3);
  const double r = rate(std::max(p, 0.0), gain, s.radio);
  if (b == 0.0) return {0.0, 0.0, 0.0};
  if (!(r > 0.0)) return {kInf, 0.0, 0.0};
  const double w = s.task.t_max - b / r;
  if (!(w > 0.0)) return {kInf, 0.0, 0.0};
  const double dr = rate_derivative(std::max(p, 0.0), gain, s.radio);
  const double b3 = b * b * b;
  OffloadTerm t;
  t.value = kc3 * b3 / (w * w);
  t.d_bits = kc3 * (3.0 * b * b / (w * w) + 2.0 * b3 / (w * w * w * r));
  t.d_power = -2.0 * kc3 * b3 / (w * w * w) * (b * dr / (r * r));
  return t;
}

}  // namespace

double p2_objective(const Scenario& s, const std::vector<std::size_t>& devices,
                    const std::vector<double>& power_w, double b0,
                    const std::vector<double>& bits) {
  const double kc3 = s.caps.kappa * std::pow(s.task.cycles_per_bit, 3);
  double v = kc3 * b0 * b0 * b0 / (s.task.t_max * s.task.t_max);
  for (std::size_t a = 0; a < devices.size(); ++a) {
    v += offload_term(power_w[a], bits[a], s.gains.at(devices[a] - 1), s).value;
  }
  return v;
}

P2Solution solve_p2(const Scenario& s, double alpha, double pmax, double b_current,
                    const std::vector<std::size_t>& devices, const SolverOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(b_current > 0.0)) throw std::invalid_argument("solve_p2 needs a positive task size");
  if (!(pmax >= 0.0)) throw std::invalid_argument("power budget must be nonnegative");
  for (std::size_t d : devices) {
    if (d < 1 || d > s.num_offload()) throw std::invalid_argument("solve_p2: device index");
  }
  const std::size_t n = devices.size();
  P2Solution sol;
  sol.devices = devices;
  if (n == 0 || pmax <= 0.0) {
    sol.power_w.assign(n, 0.0);
    sol.bits.assign(n, 0.0);
    sol.b0 = b_current;
    sol.objective = p2_objective(s, devices, sol.power_w, sol.b0, sol.bits);
    return sol;
  }

  const double T = s.task.t_max;
  const double kc3 = s.caps.kappa * std::pow(s.task.cycles_per_bit, 3);
  std::vector<double> gains(n);
  for (std::size_t a = 0; a < n; ++a) gains[a] = s.gains[devices[a] - 1];

  // z = [P_1..P_n, b_0, b_1..b_n]
  ConvexProgram prog;
  prog.dim = 2 * n + 1;
  prog.objective = [&s, gains, n, kc3, T](std::span<const double> z, std::span<double> g) {
    const double b0 = z[n];
    double v = kc3 * b0 * b0 * b0 / (T * T);
    if (!g.empty()) g[n] = 3.0 * kc3 * b0 * b0 / (T * T);
    for (std::size_t a = 0; a < n; ++a) {
      const OffloadTerm t = offload_term(z[a], z[n + 1 + a], gains[a], s);
      v += t.value;
      if (!g.empty()) {
        g[a] = t.d_power;
        g[n + 1 + a] = t.d_bits;
      }
    }
    return v;
  };
  prog.inequalities.push_back([n, pmax](std::span<const double> z, std::span<double> g) {
    double sum = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      sum += z[a];
      if (!g.empty()) g[a] = 1.0;
    }
    if (!g.empty()) std::fill(g.begin() + static_cast<std::ptrdiff_t>(n), g.end(), 0.0);
    return sum - pmax;
  });
  for (std::size_t a = 0; a < n; ++a) {
    prog.inequalities.push_back(
        [&s, a, n, alpha, T, gain = gains[a]](std::span<const double> z, std::span<double> g) {
          const double p = std::max(z[a], 0.0);
          if (!g.empty()) {
            std::fill(g.begin(), g.end(), 0.0);
            g[a] = -alpha * T * rate_derivative(p, gain, s.radio);
            g[n + 1 + a] = 1.0;
          }
          return z[n + 1 + a] - alpha * T * rate(p, gain, s.radio);
        });
  }
  std::vector<double> row(2 * n + 1, 0.0);
  std::fill(row.begin() + static_cast<std::ptrdiff_t>(n), row.end(), 1.0);
  prog.add_equality(row, b_current);
  prog.lower.assign(2 * n + 1, 0.0);
  prog.upper.assign(2 * n + 1, kInf);
  prog.scale.assign(2 * n + 1, b_current);
  for (std::size_t a = 0; a < n; ++a) prog.scale[a] = pmax;

  std::vector<double> z0(2 * n + 1);
  double offloaded = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    z0[a] = 0.9 * pmax / static_cast<double>(n);
    const double r = rate(z0[a], gains[a], s.radio);
    z0[n + 1 + a] = std::min(b_current / static_cast<double>(n + 1), 0.5 * alpha * r * T);
    offloaded += z0[n + 1 + a];
  }
  z0[n] = b_current - offloaded;

  const SolverResult res = minimize(prog, z0, opts);
  if (res.status == SolverStatus::infeasible) {
    throw InfeasibleError("partition step found no interior point");
  }
  sol.status = res.status;
  sol.power_w.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
  sol.b0 = res.x[n];
  sol.bits.assign(res.x.begin() + static_cast<std::ptrdiff_t>(n + 1), res.x.end());
  sol.objective = res.objective;
  return sol;
}

std::vector<double> solve_p3(const Scenario& s, const std::vector<double>& bits,
                             const std::vector<double>& t_up, const ChanceConstants& k) {
  const std::size_t J = s.num_offload();
  if (bits.size() != J + 1 || t_up.size() != J) throw std::invalid_argument("solve_p3 sizes");
  const double T = s.task.t_max;
  const double c = s.task.cycles_per_bit;
  std::vector<double> f(J + 1, 0.0);
  f[0] = min_frequency(bits[0], T, k.inv_cdf_gamma.at(0), c);
  for (std::size_t j = 1; j <= J; ++j) {
    if (bits[j] > 0.0 && !(t_up[j - 1] < T)) {
      throw InfeasibleError("upload of device " + std::to_string(j) + " exceeds the deadline");
    }
    f[j] = min_frequency(bits[j], T - t_up[j - 1], k.inv_cdf_gamma.at(j), c);
  }
  return f;
}

double repair_portion(std::size_t j, const Scenario& s, double rate_bps, const ChanceConstants& k) {
  if (j < 1 || j > s.num_offload()) throw std::invalid_argument("repair_portion: device index");
  return offload_capacity(s.caps.f_max_hz[j], rate_bps, k.inv_cdf_gamma.at(j), s.task);
}

SolveReport solve_two_step(const Scenario& s, const TwoStepParams& params) {
  s.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, params.gamma);
  const std::size_t J = s.num_offload();
  const double T = s.task.t_max;

  SolveReport rep;
  rep.method = Method::two_step;
  Allocation a = Allocation::zeros(J);
  std::vector<std::size_t> active(J);
  for (std::size_t j = 0; j < J; ++j) active[j] = j + 1;
  double b_left = s.task.bits;
  double p_left = s.radio.p_max_w;
  const double b_floor = 1e-12 * s.task.bits;

  while (true) {
    if (b_left <= b_floor) {
      a.bits[0] = 0.0;
      break;
    }
    const P2Solution p2 = solve_p2(s, params.alpha, p_left, b_left, active, params.solver);
    if (!active.empty() && p_left > 0.0) ++rep.iterations;
    if (p2.status != SolverStatus::converged) rep.converged = false;

    std::vector<double> bits(J + 1, 0.0), t_up(J, 0.0), power(J, 0.0);
    bits[0] = p2.b0;
    for (std::size_t idx = 0; idx < active.size(); ++idx) {
      const std::size_t j = active[idx];
      bits[j] = p2.bits[idx];
      power[j - 1] = p2.power_w[idx];
      if (bits[j] > 0.0) t_up[j - 1] = bits[j] / s.rate_to(j, power[j - 1]);
    }
    const std::vector<double> f = solve_p3(s, bits, t_up, k);

    std::size_t worst = 0;
    double worst_ratio = 1.0;
    for (std::size_t j : active) {
      const double ratio = f[j] / s.caps.f_max_hz[j];
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = j;
      }
    }
    if (worst == 0) {
      for (std::size_t j : active) {
        a.bits[j] = bits[j];
        a.freq_hz[j] = f[j];
        a.power_w[j - 1] = power[j - 1];
        a.t_up_s[j - 1] = t_up[j - 1];
      }
      a.bits[0] = bits[0];
      break;
    }

    if (rep.repairs.size() >= J) throw std::logic_error("two-step repair loop exceeded J events");
    const double p_star = power[worst - 1];
    const double r = s.rate_to(worst, p_star);
    const double b_plus = repair_portion(worst, s, r, k);
    a.bits[worst] = b_plus;
    a.freq_hz[worst] = s.caps.f_max_hz[worst];
    a.power_w[worst - 1] = p_star;
    a.t_up_s[worst - 1] = b_plus / r;
    b_left = std::max(0.0, b_left - b_plus);
    p_left = std::max(0.0, p_left - p_star);
    active.erase(std::find(active.begin(), active.end(), worst));
    rep.repairs.push_back(RepairEvent{worst, f[worst], b_plus, b_left, p_left});
    if (b_left <= b_floor) break;
  }

  a.freq_hz[0] = min_frequency(a.bits[0], T, k.inv_cdf_gamma[0], s.task.cycles_per_bit);
  if (a.freq_hz[0] > s.caps.f_max_hz[0]) {
    throw InfeasibleError("active device needs " + std::to_string(a.freq_hz[0]) +
                          " Hz, above its cap");
  }
  rep.allocation = a;
  rep.energy_j = expected_total_energy(a, s);
  rep.feasibility = check_feasibility(a, s, params.gamma);
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

SolveReport local_baseline(const Scenario& s, double gamma) {
  s.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, gamma);
  SolveReport rep;
  rep.method = Method::local;
  Allocation a = Allocation::zeros(s.num_offload());
  a.bits[0] = s.task.bits;
  a.freq_hz[0] = min_frequency(s.task.bits, s.task.t_max, k.inv_cdf_gamma[0],
                               s.task.cycles_per_bit);
  if (a.freq_hz[0] > s.caps.f_max_hz[0]) {
    throw InfeasibleError("local computation needs " + std::to_string(a.freq_hz[0]) +
                          " Hz, above the active device cap");
  }
  rep.allocation = a;
  rep.energy_j = expected_total_energy(a, s);
  rep.feasibility = check_feasibility(a, s, gamma);
  rep.iterations = 0;
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

}  // namespace fogalloc
