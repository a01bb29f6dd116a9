#include "fogalloc/dc_method.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace fogalloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> rates_of(const Allocation& a, const Scenario& s) {
  std::vector<double> r(s.num_offload());
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = s.rate_to(j + 1, a.power_w[j]);
  return r;
}

// Penalized objective of one offloader's upload as a function of its power.
double power_cost(double p, double bits, double t_up, double gain, const RadioParams& radio,
                  double lambda) {
  const double r = rate(p, gain, radio);
  if (!(r > 0.0)) return kInf;
  const double up = bits / r;
  return p * up + lambda * std::abs(up - t_up);
}

// Minimizes power_cost over [lo, hi] by a log-spaced scan and golden-section
// refinement around the best sample.
double best_power(double lo, double hi, double bits, double t_up, double gain,
                  const RadioParams& radio, double lambda) {
  constexpr int kSamples = 48;
  auto cost = [&](double p) { return power_cost(p, bits, t_up, gain, radio, lambda); };
  std::vector<double> grid(kSamples);
  const double ratio = std::log(hi / lo);
  int best = 0;
  double best_cost = kInf;
  for (int i = 0; i < kSamples; ++i) {
    grid[i] = lo * std::exp(ratio * i / (kSamples - 1));
    const double c = cost(grid[i]);
    if (c < best_cost) {
      best_cost = c;
      best = i;
    }
  }
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kSamples - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double c1 = cost(x1), c2 = cost(x2);
  for (int it = 0; it < 60 && b - a > 1e-12 * b; ++it) {
    if (c1 <= c2) {
      b = x2;
      x2 = x1;
      c2 = c1;
      x1 = b - g * (b - a);
      c1 = cost(x1);
    } else {
      a = x1;
      x1 = x2;
      c1 = c2;
      x2 = a + g * (b - a);
      c2 = cost(x2);
    }
  }
  double p = grid[best];
  if (c1 < best_cost) {
    p = x1;
    best_cost = c1;
  }
  if (c2 < best_cost) p = x2;
  return p;
}

// Coordinate update of the powers; only improvements are accepted so the
// penalized objective cannot increase.
void update_powers(Allocation& a, const Scenario& s, double lambda) {
  const double p_floor = 1e-9 * s.radio.p_max_w;
  double used = 0.0;
  for (double p : a.power_w) used += p;
  for (std::size_t j = 0; j < s.num_offload(); ++j) {
    const double bits = a.bits[j + 1];
    if (!(bits > 0.0)) continue;
    const double slack = std::max(0.0, s.radio.p_max_w - used);
    const double hi = a.power_w[j] + slack;
    if (!(hi > p_floor)) continue;
    const double gain = s.gains[j];
    const double current = power_cost(a.power_w[j], bits, a.t_up_s[j], gain, s.radio, lambda);
    const double p = best_power(p_floor, hi, bits, a.t_up_s[j], gain, s.radio, lambda);
    const double c = power_cost(p, bits, a.t_up_s[j], gain, s.radio, lambda);
    if (c < current) {
      used += p - a.power_w[j];
      a.power_w[j] = p;
    }
  }
}

struct Subproblem {
  ConvexProgram prog;
  std::vector<double> x0;
};

Subproblem build_subproblem(const Scenario& s, const ChanceConstants& k, const DcParams& params,
                            const DcScales& scales, const Allocation& a) {
  const std::size_t J = s.num_offload();
  const DcLayout L{J};
  const std::vector<double> rates = rates_of(a, s);
  auto h = std::make_shared<PenalizedObjective>(
      penalized_objective(s, k, params.lambda, rates, scales));

  Subproblem sp;
  sp.x0 = L.pack(a);
  double s_scale = 1e-9 * s.task.t_max;
  for (std::size_t j = 0; j < J; ++j) {
    const auto& eq = h->equalities[j];
    const double ye = eq.y(sp.x0, {});
    const double ze = eq.z(sp.x0, {});
    const double top = std::max(ye, ze);
    sp.x0[L.s(j)] = top + 1e-12 * (std::abs(ye) + std::abs(ze)) + 1e-15 * s.task.t_max;
    s_scale = std::max(s_scale, std::abs(top));
  }

  ConvexProgram& prog = sp.prog;
  prog.dim = L.size();
  const Tangent zt = tangent([h](std::span<const double> x, std::span<double> g) {
    return h->z_lambda(x, g);
  }, sp.x0);
  prog.objective = [h, zt](std::span<const double> x, std::span<double> g) {
    const double v = h->y_lambda(x, g) - zt(x);
    if (!g.empty()) {
      for (std::size_t i = 0; i < zt.grad.size(); ++i) g[i] -= zt.grad[i];
    }
    return v;
  };
  prog.inequalities.push_back(linearize(dcf_chance_local(L, k), sp.x0));
  for (std::size_t j = 0; j < J; ++j) {
    prog.inequalities.push_back(linearize(dcf_chance_offload(L, j, k, s.task, scales), sp.x0));
  }
  for (std::size_t j = 0; j < J; ++j) {
    const std::size_t is = L.s(j);
    for (SmoothFn part : {h->equalities[j].y, h->equalities[j].z}) {
      prog.inequalities.push_back([part, is](std::span<const double> x, std::span<double> g) {
        const double v = part(x, g) - x[is];
        if (!g.empty()) g[is] -= 1.0;
        return v;
      });
    }
  }
  std::vector<double> row(L.size(), 0.0);
  for (std::size_t i = 0; i <= J; ++i) row[L.b(i)] = 1.0;
  prog.add_equality(row, s.task.bits);

  prog.lower.assign(L.size(), -kInf);
  prog.upper.assign(L.size(), kInf);
  prog.scale.assign(L.size(), 1.0);
  for (std::size_t j = 0; j < J; ++j) {
    prog.lower[L.p(j)] = prog.upper[L.p(j)] = a.power_w[j];
    prog.scale[L.p(j)] = s.radio.p_max_w;
    prog.lower[L.t(j)] = 0.0;
    prog.upper[L.t(j)] = s.task.t_max;
    prog.scale[L.t(j)] = s.task.t_max;
    prog.scale[L.s(j)] = s_scale;
  }
  for (std::size_t i = 0; i <= J; ++i) {
    prog.lower[L.b(i)] = 0.0;
    prog.upper[L.b(i)] = s.task.bits;
    prog.scale[L.b(i)] = s.task.bits;
    prog.lower[L.f(i)] = 0.0;
    prog.upper[L.f(i)] = s.caps.f_max_hz[i];
    prog.scale[L.f(i)] = scales.freq[i];
  }
  // Keeps the logarithms of the local chance constraint defined.
  prog.lower[L.b(0)] = 1e-6 * s.task.bits;
  prog.lower[L.f(0)] = 1e-6 * scales.freq[0];
  return sp;
}

// t_up = b / R(P); frequencies raised where the shorter compute window would
// break a chance constraint. An offloader that would need more than its cap
// keeps only its capacity at f_max and the excess returns to the active device.
Allocation project(Allocation a, const Scenario& s, const ChanceConstants& k) {
  const double c = s.task.cycles_per_bit;
  const double T = s.task.t_max;
  for (std::size_t j = 0; j < s.num_offload(); ++j) {
    const double bits = a.bits[j + 1];
    if (bits <= 0.0) {
      a.bits[0] += std::max(bits, 0.0);
      a.bits[j + 1] = 0.0;
      a.t_up_s[j] = 0.0;
      continue;
    }
    const double r = s.rate_to(j + 1, a.power_w[j]);
    const double f_max = s.caps.f_max_hz[j + 1];
    a.t_up_s[j] = bits / r;
    const double need = min_frequency(bits, T - a.t_up_s[j], k.inv_cdf_gamma[j + 1], c);
    if (need <= a.freq_hz[j + 1]) continue;
    if (need <= f_max) {
      a.freq_hz[j + 1] = need;
      continue;
    }
    const double keep = offload_capacity(f_max, r, k.inv_cdf_gamma[j + 1], s.task);
    a.bits[0] += bits - keep;
    a.bits[j + 1] = keep;
    a.t_up_s[j] = keep / r;
    a.freq_hz[j + 1] = f_max;
  }
  const double need0 = min_frequency(a.bits[0], T, k.inv_cdf_gamma[0], c);
  if (a.freq_hz[0] < need0) a.freq_hz[0] = need0;
  return a;
}

}  // namespace

Allocation dc_initial_point(const Scenario& s, const ChanceConstants& k) {
  const std::size_t J = s.num_offload();
  const double B = s.task.bits;
  const double T = s.task.t_max;
  const double c = s.task.cycles_per_bit;
  Allocation a = Allocation::zeros(J);
  double offloaded = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    a.power_w[j] = s.radio.p_max_w / static_cast<double>(J);
    const double r = s.rate_to(j + 1, a.power_w[j]);
    const double cap = offload_capacity(s.caps.f_max_hz[j + 1], r, k.inv_cdf_gamma[j + 1], s.task);
    a.bits[j + 1] = std::min(B / static_cast<double>(J + 1), 0.9 * cap);
    a.t_up_s[j] = a.bits[j + 1] / r;
    a.freq_hz[j + 1] =
        min_frequency(a.bits[j + 1], T - a.t_up_s[j], k.inv_cdf_gamma[j + 1], c) * (1.0 + 1e-6);
    offloaded += a.bits[j + 1];
  }
  a.bits[0] = B - offloaded;
  a.freq_hz[0] = min_frequency(a.bits[0], T, k.inv_cdf_gamma[0], c) * (1.0 + 1e-6);
  return a;
}

double dc_penalized_value(const Allocation& a, const Scenario& s, const ChanceConstants& k,
                          double lambda) {
  (void)k;
  double v = expected_total_energy(a, s);
  for (std::size_t j = 0; j < s.num_offload(); ++j) {
    const double bits = a.bits[j + 1];
    const double r = s.rate_to(j + 1, a.power_w[j]);
    const double up = bits > 0.0 ? bits / r : 0.0;
    v += lambda * std::abs(up - a.t_up_s[j]);
  }
  return v;
}

SolveReport solve_dc(const Scenario& s, const DcParams& params,
                     const std::optional<Allocation>& x0) {
  s.validate();
  if (!(params.epsilon > 0.0) || params.k_max < 1) {
    throw std::invalid_argument("DC stopping parameters must be positive");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, params.gamma);
  const std::size_t J = s.num_offload();

  SolveReport rep;
  rep.method = Method::dc;

  if (J == 0) {
    Allocation a = Allocation::zeros(0);
    a.bits[0] = s.task.bits;
    a.freq_hz[0] = min_frequency(s.task.bits, s.task.t_max, k.inv_cdf_gamma[0],
                                 s.task.cycles_per_bit);
    rep.allocation = a;
    rep.energy_j = expected_total_energy(a, s);
    rep.feasibility = check_feasibility(a, s, params.gamma);
    rep.iterations = 1;
    rep.trace.iterates.push_back(a);
    rep.trace.h_values.push_back(rep.energy_j);
    rep.trace.subproblem_statuses.emplace_back("closed_form");
    rep.trace.converged = true;
    rep.wall_time_s = rep.trace.wall_time_s = seconds_since(t0);
    return rep;
  }

  const DcScales scales = DcScales::from(s, k);
  const DcLayout L{J};
  Allocation xk = x0 ? *x0 : dc_initial_point(s, k);
  if (!xk.consistent_with(J)) throw std::invalid_argument("DC start has wrong dimensions");
  double hk = dc_penalized_value(xk, s, k, params.lambda);
  if (!std::isfinite(hk)) throw InfeasibleError("DC start point has no finite objective");
  rep.trace.iterates.push_back(xk);
  rep.trace.h_values.push_back(hk);

  int iter = 0;
  bool converged = false;
  while (iter < params.k_max) {
    Subproblem sp = build_subproblem(s, k, params, scales, xk);
    SolverResult res;
    ++iter;
    try {
      res = minimize(sp.prog, sp.x0, params.solver);
    } catch (const std::domain_error&) {
      // Phase 1 left the domain of the log terms: no usable interior point.
      rep.trace.subproblem_statuses.emplace_back("domain_error");
      break;
    }
    rep.trace.subproblem_statuses.emplace_back(to_string(res.status));
    if (res.status == SolverStatus::infeasible) break;

    Allocation next = L.unpack(res.x);
    update_powers(next, s, params.lambda);
    const double h_next = dc_penalized_value(next, s, k, params.lambda);
    if (!(h_next <= hk + 1e-9 * std::max(1.0, std::abs(hk)))) {
      rep.trace.stalled = true;
      break;
    }
    const double change = std::abs(h_next - hk);
    xk = next;
    hk = h_next;
    rep.trace.iterates.push_back(xk);
    rep.trace.h_values.push_back(hk);
    if (change <= params.epsilon) {
      converged = true;
      break;
    }
  }

  rep.allocation = project(xk, s, k);
  rep.energy_j = expected_total_energy(rep.allocation, s);
  rep.feasibility = check_feasibility(rep.allocation, s, params.gamma);
  rep.iterations = iter;
  rep.converged = converged;
  rep.trace.converged = converged;
  rep.wall_time_s = rep.trace.wall_time_s = seconds_since(t0);
  return rep;
}

}  // namespace fogalloc
