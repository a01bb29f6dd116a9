#include "fogalloc/validation.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "fogalloc/channel.hpp"
#include "fogalloc/dc_method.hpp"
#include "fogalloc/dcf.hpp"
#include "fogalloc/monte_carlo.hpp"
#include "fogalloc/oracle.hpp"
#include "fogalloc/two_step.hpp"

namespace fogalloc {

namespace {

constexpr double kGamma = 0.95;

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

CheckResult timed(const std::string& name, const std::function<CheckResult()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.name = name;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Scenario scenario(std::uint64_t seed, std::size_t J, double t_max = 1.0, double f_max = 1e8) {
  ScenarioConfig c;
  c.num_offload = J;
  c.t_max_s = t_max;
  c.f_max_hz = f_max;
  return generate_scenario(c, seed);
}

// Random interior point of the DC vector with s = 0.
std::vector<double> random_point(const Scenario& s, const DcLayout& L, Rng& rng) {
  std::vector<double> x(L.size(), 0.0);
  for (std::size_t j = 0; j < L.num_offload; ++j) {
    x[L.p(j)] = uniform(rng, 1e-3, s.radio.p_max_w);
    x[L.t(j)] = uniform(rng, 1e-3, s.task.t_max);
  }
  for (std::size_t i = 0; i <= L.num_offload; ++i) {
    x[L.b(i)] = uniform(rng, 1e-3, 1.0) * s.task.bits;
    x[L.f(i)] = uniform(rng, 1e-3, 1.0) * s.caps.f_max_hz[i];
  }
  return x;
}

CheckResult dcf_identities(std::uint64_t seed) {
  Rng rng = make_rng(seed, 1);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Scenario s = scenario(derive_seed(seed, 1000 + n), 1 + n % 3);
    const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, kGamma);
    const DcLayout L{s.num_offload()};
    const DcScales sc = DcScales::from(s, k);
    const std::vector<double> x = random_point(s, L, rng);
    std::vector<double> rates;
    for (std::size_t j = 0; j < L.num_offload; ++j) rates.push_back(s.rate_to(j + 1, x[L.p(j)]));
    auto rel = [&](double got, double want, double mag) {
      worst = std::max(worst, std::abs(got - want) / std::max(mag, 1e-300));
    };
    double up = 0.0;
    for (std::size_t j = 0; j < L.num_offload; ++j) up += x[L.p(j)] * x[L.b(j + 1)] / rates[j];
    rel(dcf_upload(L, rates).value(x), up, up);
    double ce = 0.0;
    for (std::size_t i = 0; i <= L.num_offload; ++i) {
      ce += s.caps.kappa * s.task.cycles_per_bit * k.eta[i] * x[L.b(i)] * x[L.f(i)] * x[L.f(i)];
    }
    rel(dcf_compute_energy(L, s, k, sc).value(x), ce, ce);
    rel(dcf_chance_local(L, k).value(x),
        std::log(x[L.b(0)]) - std::log(x[L.f(0)]) - std::log(k.q[0]),
        std::abs(std::log(x[L.b(0)])) + std::abs(std::log(x[L.f(0)])) + std::abs(std::log(k.q[0])));
    for (std::size_t j = 0; j < L.num_offload; ++j) {
      const double b = x[L.b(j + 1)], t = x[L.t(j)], f = x[L.f(j + 1)], q = k.q[j + 1];
      rel(dcf_equality(L, j, rates[j], sc).value(x), b / rates[j] - t, b / rates[j] + t);
      const double tf = q / s.task.t_max * t * f;
      rel(dcf_chance_offload(L, j, k, s.task, sc).value(x), tf + b - q * f, tf + b + q * f);
    }
  }
  return {"", worst <= 1e-9, fmt("worst relative error %.3g", worst)};
}

CheckResult chance_equivalence(std::uint64_t seed) {
  Rng rng = make_rng(seed, 2);
  const Scenario s = scenario(seed, 3);
  const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, kGamma);
  McOptions mc;
  mc.samples = 20000;
  int mismatches = 0;
  const int n = 40;
  for (int trial = 0; trial < n; ++trial) {
    Allocation a = Allocation::zeros(s.num_offload());
    for (std::size_t i = 0; i < s.num_devices(); ++i) {
      const double margin = uniform(rng, -0.05, 0.05);
      const double f = uniform(rng, 0.2, 1.0) * s.caps.f_max_hz[i];
      const double window = i == 0 ? s.task.t_max : uniform(rng, 0.1, 0.9) * s.task.t_max;
      if (i > 0) a.t_up_s[i - 1] = s.task.t_max - window;
      a.freq_hz[i] = f;
      a.bits[i] = (1.0 - k.inv_cdf_gamma[i] - margin) * f * window / s.task.cycles_per_bit;
    }
    mc.seed = derive_seed(seed, 5000 + trial);
    const std::vector<double> m = deadline_margins(a, s, kGamma);
    const std::vector<double> p = success_rates(a, s, mc);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const bool ok = m[i] >= 0.0 ? p[i] >= kGamma - 0.01 : p[i] < kGamma + 0.01;
      if (!ok) ++mismatches;
    }
  }
  return {"", mismatches == 0, fmt("%.0f mismatches over %.0f device checks", mismatches, n * 4.0)};
}

CheckResult p3_closed_form(std::uint64_t seed) {
  Rng rng = make_rng(seed, 3);
  double worst = 0.0;
  for (int n = 0; n < 500; ++n) {
    const Scenario s = scenario(derive_seed(seed, 3000 + n), 1 + n % 3);
    const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, kGamma);
    std::vector<double> bits(s.num_devices()), t_up(s.num_offload());
    for (double& b : bits) b = uniform(rng, 0.01, 1.0) * s.task.bits;
    for (double& t : t_up) t = uniform(rng, 0.01, 0.9) * s.task.t_max;
    const std::vector<double> f = solve_p3(s, bits, t_up, k);
    worst = std::max(worst, std::abs(deterministic_margin_local(bits[0], f[0], k, s.task)));
    for (std::size_t d = 1; d < s.num_devices(); ++d) {
      worst = std::max(worst, std::abs(deterministic_margin_offload(d, bits[d], f[d], t_up[d - 1],
                                                                   k, s.task)));
    }
  }
  return {"", worst <= 1e-12, fmt("worst |margin| %.3g", worst)};
}

CheckResult dc_descent(std::uint64_t seed) {
  int nonmonotone = 0, converged = 0;
  const int n = 10;
  for (int r = 0; r < n; ++r) {
    const SolveReport rep = solve_dc(scenario(derive_seed(seed, 4000 + r), 1 + r % 3));
    const auto& h = rep.trace.h_values;
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (h[i] > h[i - 1] + 1e-8 * std::max(1.0, std::abs(h[i - 1]))) ++nonmonotone;
    }
    if (rep.converged) ++converged;
  }
  return {"", nonmonotone == 0 && converged >= 9,
          fmt("%.0f increases, %.0f/10 converged", nonmonotone, converged)};
}

CheckResult oracle_gap(std::uint64_t seed) {
  double worst_ts = 0.0, worst_dc = 0.0;
  for (int r = 0; r < 5; ++r) {
    const Scenario s = scenario(derive_seed(seed, 6000 + r), 1);
    const double o = grid_search(s, kGamma, {}).energy_j;
    worst_ts = std::max(worst_ts, solve_two_step(s).energy_j / o);
    worst_dc = std::max(worst_dc, solve_dc(s).energy_j / o);
  }
  return {"", worst_ts <= 1.05 && worst_dc <= 1.10,
          fmt("worst two-step/oracle %.4f, DC/oracle %.4f", worst_ts, worst_dc)};
}

CheckResult end_to_end(std::uint64_t seed) {
  Rng rng = make_rng(seed, 7);
  int bad = 0;
  const int n = 60;
  for (int r = 0; r < n; ++r) {
    const double t = uniform(rng, 0.4, 1.0);
    const double f = uniform(rng, 5e7, 1.5e8);
    const Scenario s = scenario(derive_seed(seed, 7000 + r), 1 + r % 3, t, f);
    try {
      if (!check_feasibility(solve_two_step(s).allocation, s, kGamma).feasible()) ++bad;
    } catch (const InfeasibleError&) {
      ++bad;
    }
  }
  return {"", bad == 0, fmt("%.0f infeasible outputs of %.0f", bad, n)};
}

CheckResult mc_energy(std::uint64_t seed) {
  const Scenario s = scenario(seed, 2);
  const SolveReport rep = solve_two_step(s);
  McOptions mc;
  mc.seed = seed;
  const double e = mean_realized_energy(rep.allocation, s, mc);
  const double rel = std::abs(e / rep.energy_j - 1.0);
  return {"", rel <= 1e-3, fmt("Monte Carlo / expected energy - 1 = %.3g", rel)};
}

CheckResult serial_parallel(std::uint64_t seed) {
  const Scenario s = scenario(seed, 2);
  const GridSpec g{41, 21};
  const SolveReport a = grid_search(s, kGamma, g, Execution::serial);
  const SolveReport b = grid_search(s, kGamma, g, Execution::parallel);
  McOptions mc;
  mc.seed = seed;
  mc.exec = Execution::serial;
  const double e1 = mean_realized_energy(a.allocation, s, mc);
  mc.exec = Execution::parallel;
  const double e2 = mean_realized_energy(a.allocation, s, mc);
  const bool same = a.energy_j == b.energy_j && a.allocation.bits == b.allocation.bits && e1 == e2;
  return {"", same, same ? "bit-identical" : "serial and parallel results differ"};
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& opts) {
  if (opts.jobs > 0) omp_set_num_threads(opts.jobs);
  const std::uint64_t s = opts.seed;
  std::vector<CheckResult> out;
  out.push_back(timed("dcf_identities", [s] { return dcf_identities(s); }));
  out.push_back(timed("chance_equivalence", [s] { return chance_equivalence(s); }));
  out.push_back(timed("p3_closed_form", [s] { return p3_closed_form(s); }));
  out.push_back(timed("dc_descent", [s] { return dc_descent(s); }));
  out.push_back(timed("oracle_gap", [s] { return oracle_gap(s); }));
  out.push_back(timed("two_step_feasibility", [s] { return end_to_end(s); }));
  out.push_back(timed("mc_expected_energy", [s] { return mc_energy(s); }));
  out.push_back(timed("serial_parallel_agreement", [s] { return serial_parallel(s); }));
  return out;
}

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  std::size_t passed = 0;
  for (const auto& c : checks) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-4s %-26s %8.3fs  ", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.seconds);
    out << buf << c.detail << '\n';
    if (c.passed) ++passed;
  }
  out << passed << '/' << checks.size() << " checks passed\n";
}

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

}  // namespace fogalloc
