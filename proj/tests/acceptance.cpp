// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// all pass. Reference quantities (rates, energies, margins, feasibility, the
// J = 1 grid oracle, throttle simulation) are recomputed here from first
// principles rather than taken from the library.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fogalloc/channel.hpp"
#include "fogalloc/dc_method.hpp"
#include "fogalloc/dcf.hpp"
#include "fogalloc/experiments.hpp"
#include "fogalloc/oracle.hpp"
#include "fogalloc/two_step.hpp"

using namespace fogalloc;

namespace {

constexpr double kGamma = 0.95;
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- reference formulas -------------------------------------------------

double ref_rate(double p, double g, const Scenario& s) {
  return s.radio.bandwidth_hz * std::log2(1.0 + p * g / s.radio.noise_w);
}

// U(lo, hi): quantile lo + gamma (hi - lo); E[(1 - xi)^2] = 1 - (lo + hi) + (lo^2 + lo hi + hi^2) / 3.
double ref_quantile(const ThrottleModel& m) { return m.lo() + kGamma * (m.hi() - m.lo()); }
double ref_eta(const ThrottleModel& m) {
  const double a = m.lo(), b = m.hi();
  return 1.0 - (a + b) + (a * a + a * b + b * b) / 3.0;
}

double ref_energy(const Allocation& a, const Scenario& s) {
  double e = 0.0;
  for (std::size_t j = 0; j < s.num_offload(); ++j) {
    if (a.bits[j + 1] > 0.0) e += a.power_w[j] * a.bits[j + 1] / ref_rate(a.power_w[j], s.gains[j], s);
  }
  for (std::size_t i = 0; i < s.num_devices(); ++i) {
    e += s.caps.kappa * s.task.cycles_per_bit * ref_eta(s.throttle[i]) * a.bits[i] *
         a.freq_hz[i] * a.freq_hz[i];
  }
  return e;
}

// 1 - b c / (f w) - F^{-1}(gamma), the deterministic deadline margin.
double ref_margin(double bits, double freq, double window, double c, const ThrottleModel& m) {
  if (bits <= 0.0) return kInf;
  if (!(freq > 0.0) || !(window > 0.0)) return -kInf;
  return 1.0 - bits * c / (freq * window) - ref_quantile(m);
}

// Every constraint of the allocation problem, each normalized, within tol.
bool ref_feasible(const Allocation& a, const Scenario& s, double tol, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  const double B = s.task.bits, T = s.task.t_max, c = s.task.cycles_per_bit;
  double psum = 0.0, bsum = 0.0;
  for (double p : a.power_w) {
    if (p < -tol * s.radio.p_max_w) return fail("negative power");
    psum += p;
  }
  if (psum > s.radio.p_max_w * (1.0 + tol)) return fail("power budget");
  for (double b : a.bits) {
    if (b < -tol * B) return fail("negative bits");
    bsum += b;
  }
  if (std::abs(bsum - B) > tol * B) return fail("partition");
  for (std::size_t i = 0; i < s.num_devices(); ++i) {
    if (a.freq_hz[i] > s.caps.f_max_hz[i] * (1.0 + tol)) return fail("frequency cap");
    if (a.freq_hz[i] < 0.0) return fail("negative frequency");
    const double window = i == 0 ? T : T - a.t_up_s[i - 1];
    if (ref_margin(a.bits[i], a.freq_hz[i], window, c, s.throttle[i]) < -tol) {
      return fail("deadline of device " + std::to_string(i));
    }
  }
  for (std::size_t j = 0; j < s.num_offload(); ++j) {
    if (a.t_up_s[j] < -tol * T) return fail("negative upload time");
    const double r = ref_rate(std::max(a.power_w[j], 0.0), s.gains[j], s);
    if (std::abs(a.bits[j + 1] - r * a.t_up_s[j]) > tol * B) return fail("upload coupling");
  }
  return true;
}

// Exhaustive J = 1 search over b_1 in {0, B/(nb-1), ...} and P in {0, ..., P_max}.
double ref_oracle_j1(const Scenario& s, int nb, int np) {
  const double B = s.task.bits, T = s.task.t_max, c = s.task.cycles_per_bit;
  const double q0 = 1.0 - ref_quantile(s.throttle[0]), q1 = 1.0 - ref_quantile(s.throttle[1]);
  const double kc = s.caps.kappa * c;
  double best = kInf;
  for (int ib = 0; ib < nb; ++ib) {
    const double b1 = B * ib / (nb - 1);
    const double b0 = B - b1;
    const double f0 = b0 * c / (T * q0);
    if (f0 > s.caps.f_max_hz[0]) continue;
    const double e0 = kc * ref_eta(s.throttle[0]) * b0 * f0 * f0;
    if (b1 == 0.0) {
      best = std::min(best, e0);
      continue;
    }
    for (int ip = 1; ip < np; ++ip) {
      const double p = s.radio.p_max_w * ip / (np - 1);
      const double t = b1 / ref_rate(p, s.gains[0], s);
      if (!(t < T)) continue;
      const double f1 = b1 * c / ((T - t) * q1);
      if (f1 > s.caps.f_max_hz[1]) continue;
      best = std::min(best, e0 + p * t + kc * ref_eta(s.throttle[1]) * b1 * f1 * f1);
    }
  }
  return best;
}

Scenario scenario(std::uint64_t seed, std::size_t J, double t_max, double f_max) {
  ScenarioConfig c;
  c.num_offload = J;
  c.t_max_s = t_max;
  c.f_max_hz = f_max;
  return generate_scenario(c, seed);
}

// ---- reporting ------------------------------------------------------------

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s  %-34s %8.2fs  %s\n", id, o.pass ? "PASS" : "FAIL", title, secs,
              o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- criteria -------------------------------------------------------------

Outcome dcf_identities() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  double worst[5] = {0, 0, 0, 0, 0};
  auto track = [&](int k, double got, double want, double mag) {
    worst[k] = std::max(worst[k], std::abs(got - want) / mag);
  };
  for (int n = 0; n < 1000; ++n) {
    const Scenario s = scenario(5000 + n, 1 + n % 3, 0.4 + 0.6 * u(rng), 1e8);
    const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, kGamma);
    const DcLayout L{s.num_offload()};
    const DcScales sc = DcScales::from(s, k);
    std::vector<double> x(L.size(), 0.0);
    const double T = s.task.t_max, c = s.task.cycles_per_bit;
    for (std::size_t j = 0; j < L.num_offload; ++j) {
      x[L.p(j)] = u(rng) * s.radio.p_max_w;
      x[L.t(j)] = u(rng) * T;
    }
    for (std::size_t i = 0; i <= L.num_offload; ++i) {
      x[L.b(i)] = u(rng) * s.task.bits;
      x[L.f(i)] = u(rng) * s.caps.f_max_hz[i];
    }
    std::vector<double> r;
    for (std::size_t j = 0; j < L.num_offload; ++j) r.push_back(ref_rate(x[L.p(j)], s.gains[j], s));

    double up = 0.0, ce = 0.0;
    for (std::size_t j = 0; j < L.num_offload; ++j) up += x[L.p(j)] * x[L.b(j + 1)] / r[j];
    track(0, dcf_upload(L, r).value(x), up, up);
    for (std::size_t i = 0; i <= L.num_offload; ++i) {
      ce += s.caps.kappa * c * ref_eta(s.throttle[i]) * x[L.b(i)] * x[L.f(i)] * x[L.f(i)];
    }
    track(1, dcf_compute_energy(L, s, k, sc).value(x), ce, ce);
    const double q0 = T * (1.0 - ref_quantile(s.throttle[0])) / c;
    const double lb = std::log(x[L.b(0)]), lf = std::log(x[L.f(0)]), lq = std::log(q0);
    track(3, dcf_chance_local(L, k).value(x), lb - lf - lq,
          std::abs(lb) + std::abs(lf) + std::abs(lq));
    for (std::size_t j = 0; j < L.num_offload; ++j) {
      const double b = x[L.b(j + 1)], t = x[L.t(j)], f = x[L.f(j + 1)];
      const double q = T * (1.0 - ref_quantile(s.throttle[j + 1])) / c;
      track(2, dcf_equality(L, j, r[j], sc).value(x), b / r[j] - t, b / r[j] + t);
      track(4, dcf_chance_offload(L, j, k, s.task, sc).value(x), q / T * t * f + b - q * f,
            q / T * t * f + b + q * f);
    }
  }
  const double w = *std::max_element(worst, worst + 5);
  return {w <= 1e-9, fmt("worst rel err upload %.1e compute %.1e coupling %.1e local %.1e "
                         "offload %.1e",
                         worst[0], worst[1], worst[2], worst[3], worst[4])};
}

Outcome chance_equivalence() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int checks = 0, mismatches = 0, near = 0;
  for (int n = 0; n < 200; ++n) {
    const Scenario s = scenario(7000 + n, 3, 0.4 + 0.6 * u(rng), 1e8);
    const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, kGamma);
    const double T = s.task.t_max, c = s.task.cycles_per_bit;
    for (std::size_t i = 0; i < s.num_devices(); ++i) {
      const double f = (0.1 + 0.9 * u(rng)) * s.caps.f_max_hz[i] * (i == 0 ? 0.05 : 1.0);
      const double window = i == 0 ? T : (0.05 + 0.9 * u(rng)) * T;
      // Half the devices sit within 5% of the boundary, the rest anywhere.
      const double target = n % 2 == 0 ? -0.05 + 0.1 * u(rng) : -0.5 + 0.6 * u(rng);
      const double bits = (1.0 - k.inv_cdf_gamma[i] - target) * f * window / c;
      const double margin = i == 0 ? deterministic_margin_local(bits, f, k, s.task)
                                   : deterministic_margin_offload(i, bits, f, T - window, k, s.task);
      std::uniform_real_distribution<double> xi(s.throttle[i].lo(), s.throttle[i].hi());
      std::size_t ok = 0;
      const std::size_t samples = 100000;
      for (std::size_t m = 0; m < samples; ++m) {
        if (bits * c / ((1.0 - xi(rng)) * f) <= window) ++ok;
      }
      const double p = static_cast<double>(ok) / samples;
      const bool agree = margin >= 0.0 ? p >= kGamma - 0.01 : p < kGamma + 0.01;
      if (std::abs(margin) < 0.01) ++near;
      ++checks;
      if (!agree) ++mismatches;
    }
  }
  return {mismatches == 0,
          fmt("%d mismatches in %d device checks (%d within 0.01 of the boundary)", mismatches,
              checks, near)};
}

Outcome p3_closed_form() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 500; ++n) {
    const Scenario s = scenario(9000 + n, 1 + n % 3, 0.4 + 0.6 * u(rng), 1e8);
    const ChanceConstants k = ChanceConstants::build(s.throttle, s.task, kGamma);
    std::vector<double> bits(s.num_devices()), t_up(s.num_offload());
    for (double& b : bits) b = (1e-4 + u(rng)) * s.task.bits;
    for (double& t : t_up) t = u(rng) * 0.99 * s.task.t_max;
    const std::vector<double> f = solve_p3(s, bits, t_up, k);
    for (std::size_t i = 0; i < s.num_devices(); ++i) {
      const double window = i == 0 ? s.task.t_max : s.task.t_max - t_up[i - 1];
      const double m = ref_margin(bits[i], f[i], window, s.task.cycles_per_bit, s.throttle[i]);
      worst = std::max(worst, std::abs(m) / (1.0 - ref_quantile(s.throttle[i])));
    }
  }
  return {worst <= 1e-12, fmt("worst |margin| / (1 - F^-1) = %.2e over 500 inputs", worst)};
}

Outcome dc_descent() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int increases = 0, converged = 0, infeasible = 0;
  double worst_rise = 0.0, iters = 0.0;
  DcParams p;
  p.lambda = 12.0;
  p.epsilon = 1e-2;
  p.k_max = 1000;
  for (int n = 0; n < 100; ++n) {
    const Scenario s = scenario(11000 + n, 1 + n % 3, 0.4 + 0.6 * u(rng), 1e8);
    const SolveReport r = solve_dc(s, p);
    // Recompute H_lambda from the iterates rather than trusting the trace.
    double prev = kInf;
    for (const Allocation& a : r.trace.iterates) {
      double h = ref_energy(a, s);
      for (std::size_t j = 0; j < s.num_offload(); ++j) {
        const double up = a.bits[j + 1] > 0.0 ? a.bits[j + 1] / ref_rate(a.power_w[j], s.gains[j], s)
                                              : 0.0;
        h += p.lambda * std::abs(up - a.t_up_s[j]);
      }
      if (prev < kInf) {
        const double rise = (h - prev) / std::max(1.0, std::abs(prev));
        worst_rise = std::max(worst_rise, rise);
        if (rise > 1e-8) ++increases;
      }
      prev = h;
    }
    if (r.converged) ++converged;
    if (!ref_feasible(r.allocation, s, 1e-6)) ++infeasible;
    iters += r.iterations;
  }
  return {increases == 0 && converged >= 90,
          fmt("%d increases (worst relative rise %.1e), %d/100 converged, mean %.2f iterations, "
              "%d infeasible outputs",
              increases, worst_rise, converged, iters / 100.0, infeasible)};
}

Outcome oracle_gap() {
  double worst_ts = 0.0, worst_dc = 0.0, worst_lib = 0.0;
  for (int n = 0; n < 50; ++n) {
    const Scenario s = scenario(13000 + n, 1, 1.0, 1e8);
    const double o = ref_oracle_j1(s, 201, 101);
    const double lib = grid_search(s, kGamma, {201, 101}).energy_j;
    worst_lib = std::max(worst_lib, std::abs(lib / o - 1.0));
    const SolveReport ts = solve_two_step(s);
    const SolveReport dc = solve_dc(s);
    if (!ref_feasible(ts.allocation, s, 1e-6) || !ref_feasible(dc.allocation, s, 1e-6)) {
      return {false, fmt("infeasible output on scenario %d", n)};
    }
    worst_ts = std::max(worst_ts, ref_energy(ts.allocation, s) / o);
    worst_dc = std::max(worst_dc, ref_energy(dc.allocation, s) / o);
  }
  return {worst_ts <= 1.05 && worst_dc <= 1.10,
          fmt("worst two-step/oracle %.4f, DC/oracle %.4f (library grid agrees to %.1e)", worst_ts,
              worst_dc, worst_lib)};
}

Outcome end_to_end() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0, errors = 0;
  std::string first;
  for (int n = 0; n < 500; ++n) {
    const double t = 0.4 + 0.6 * u(rng);
    const double f = 5e7 + 1e8 * u(rng);
    const Scenario s = scenario(15000 + n, 1 + n % 3, t, f);
    try {
      const SolveReport r = solve_two_step(s);
      std::string why;
      if (!ref_feasible(r.allocation, s, 1e-6, &why) || !r.feasibility.feasible()) {
        if (first.empty()) first = fmt("scenario %d: %s", n, why.c_str());
        ++violations;
      }
    } catch (const std::exception& e) {
      if (first.empty()) first = fmt("scenario %d: %s", n, e.what());
      ++errors;
    }
  }
  return {violations == 0 && errors == 0,
          fmt("%d violations, %d exceptions over 500 scenarios %s", violations, errors,
              first.c_str())};
}

ExperimentConfig paper_grid() {
  ExperimentConfig c;
  c.runs = 200;
  c.seed = 2024;
  return c;
}

Outcome paper_ratio() {
  ExperimentConfig c = paper_grid();
  c.t_max_grid = {0.4};
  c.j_values = {3};
  c.methods = {Method::local, Method::two_step};
  const SweepResult r = sweep_tmax(c);
  double ts = 0.0, lo = 0.0;
  int paired = 0;
  for (std::size_t i = 0; i < r.records.size(); i += 2) {
    const RunRecord& a = r.records[i];
    const RunRecord& b = r.records[i + 1];
    if (!a.failure_code.empty() || !b.failure_code.empty()) continue;
    lo += a.energy_j;
    ts += b.energy_j;
    ++paired;
  }
  const double ratio = ts / lo;
  return {paired >= 200 && ratio >= 0.60 && ratio <= 0.80,
          fmt("mean two-step / mean local = %.4f over %d paired runs", ratio, paired)};
}

Outcome ordering_and_trends() {
  const ExperimentConfig c = paper_grid();
  const SweepResult tm = sweep_tmax(c);
  const SweepResult fm = sweep_fmax(c);
  std::vector<std::string> bad;
  double min_gap = kInf;
  auto mean = [](const SweepResult& r, double x, std::size_t J, Method m) {
    const PointSummary* p = r.find(x, J, m);
    return p && p->runs >= 200 ? p->mean_energy_j : std::nan("");
  };
  for (double t : c.t_max_grid) {
    for (std::size_t J : c.j_values) {
      const double dc = mean(tm, t, J, Method::dc), ts = mean(tm, t, J, Method::two_step);
      min_gap = std::min(min_gap, dc - ts);
      if (!(ts <= dc)) bad.push_back(fmt("two-step > DC at t=%.1f J=%zu (%.6g vs %.6g)", t, J, ts, dc));
    }
  }
  for (Method m : {Method::local, Method::dc, Method::two_step}) {
    for (std::size_t J : c.j_values) {
      for (std::size_t i = 1; i < c.t_max_grid.size(); ++i) {
        const double a = mean(tm, c.t_max_grid[i - 1], J, m), b = mean(tm, c.t_max_grid[i], J, m);
        if (!(b < a)) bad.push_back(fmt("%s J=%zu not decreasing in t_max", std::string(to_string(m)).c_str(), J));
      }
      for (std::size_t i = 1; i < c.f_max_grid.size(); ++i) {
        const double a = mean(fm, c.f_max_grid[i - 1], J, m), b = mean(fm, c.f_max_grid[i], J, m);
        if (!(b <= a)) bad.push_back(fmt("%s J=%zu increasing in F_max", std::string(to_string(m)).c_str(), J));
      }
    }
    if (m == Method::local) continue;
    for (std::size_t i = 1; i < c.j_values.size(); ++i) {
      for (double t : c.t_max_grid) {
        if (!(mean(tm, t, c.j_values[i], m) <= mean(tm, t, c.j_values[i - 1], m))) {
          bad.push_back(fmt("%s increasing in J at t=%.1f", std::string(to_string(m)).c_str(), t));
        }
      }
      for (double f : c.f_max_grid) {
        if (!(mean(fm, f, c.j_values[i], m) <= mean(fm, f, c.j_values[i - 1], m))) {
          bad.push_back(fmt("%s increasing in J at F_max=%.3g", std::string(to_string(m)).c_str(), f));
        }
      }
    }
  }
  std::string detail = fmt("smallest DC - two-step mean gap %.3e J", min_gap);
  if (!bad.empty()) detail += fmt("; %zu violations, first: %s", bad.size(), bad.front().c_str());
  return {bad.empty(), detail};
}

Outcome runtime_ordering() {
  const ExperimentConfig c = paper_grid();
  const SweepResult r = runtime_table(c);
  bool ok = true;
  std::string detail;
  for (double f : c.runtime_f_max) {
    double ratio_j1 = 0.0, ratio_j3 = 0.0;
    for (std::size_t J : c.runtime_j_values) {
      const PointSummary* dc = r.find(f, J, Method::dc);
      const PointSummary* ts = r.find(f, J, Method::two_step);
      const double ratio = dc->mean_wall_time_s / ts->mean_wall_time_s;
      if (!(ratio > 1.0)) ok = false;
      if (J == 1) ratio_j1 = ratio;
      if (J == 3) ratio_j3 = ratio;
      detail += fmt("F=%.0e J=%zu %.1fx (%.2f/%.2f it) ", f, J, ratio, dc->mean_iterations,
                    ts->mean_iterations);
    }
    if (!(ratio_j3 > ratio_j1)) ok = false;
  }
  return {ok, detail};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  const std::string dir = FOGALLOC_TEST_TMP;
  const std::string cfg = dir + "/acceptance_sweep.json";
  std::ofstream(cfg) << R"({"experiment": {"runs": 50}, "method": {"name": "both"}})";
  const std::string base = std::string(FOGALLOC_CLI_PATH) + " sweep-tmax --config " + cfg +
                           " --seed 77 --out ";
  const std::string a = dir + "/acceptance_a.csv", b = dir + "/acceptance_b.csv";
  const int ra = std::system((base + a).c_str());
  const int rb = std::system((base + b).c_str());
  if (ra != 0 || rb != 0) return {false, "CLI exited with an error"};
  const std::string ca = slurp(a), cb = slurp(b);
  const std::size_t rows = static_cast<std::size_t>(std::count(ca.begin(), ca.end(), '\n'));
  return {!ca.empty() && ca == cb,
          fmt("%zu CSV lines, %zu bytes, %s", rows, ca.size(), ca == cb ? "identical" : "DIFFERENT")};
}

}  // namespace

int main() {
  criterion(1, "DCF identities", 1.0, dcf_identities);
  criterion(2, "chance-constraint equivalence", 30.0, chance_equivalence);
  criterion(3, "frequency closed form", 1.0, p3_closed_form);
  criterion(4, "DC descent", 600.0, dc_descent);
  criterion(5, "oracle optimality gap", 300.0, oracle_gap);
  criterion(6, "end-to-end feasibility", 300.0, end_to_end);
  criterion(7, "energy ratio t_max=0.4 J=3", 600.0, paper_ratio);
  criterion(8, "ordering and trends", 1800.0, ordering_and_trends);
  criterion(9, "run-time ordering", 900.0, runtime_ordering);
  criterion(10, "determinism", 600.0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
