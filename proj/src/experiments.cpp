#include "fogalloc/experiments.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "fogalloc/monte_carlo.hpp"

namespace fogalloc {

void ExperimentConfig::validate() const {
  scenario.validate();
  validate_gamma(gamma);
  if (runs == 0) throw std::invalid_argument("experiment needs at least one run");
  if (methods.empty()) throw std::invalid_argument("experiment needs at least one method");
  if (jobs < 0) throw std::invalid_argument("jobs must be nonnegative");
  for (double t : t_max_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("t_max grid values must be positive");
  }
  for (double f : f_max_grid) {
    if (!(f > scenario.f_min_hz)) throw std::invalid_argument("F_max grid values must exceed F_min");
  }
  for (double f : runtime_f_max) {
    if (!(f > scenario.f_min_hz)) throw std::invalid_argument("runtime F_max must exceed F_min");
  }
  if (!(runtime_t_max > 0.0) || !(fmax_sweep_t_max > 0.0)) {
    throw std::invalid_argument("experiment deadlines must be positive");
  }
}

const PointSummary* SweepResult::find(double axis_value, std::size_t num_offload,
                                      Method m) const {
  for (const auto& p : points) {
    if (p.axis == axis_value && p.num_offload == num_offload && p.method == m) return &p;
  }
  return nullptr;
}

std::uint64_t run_seed(std::uint64_t master, std::size_t run) { return derive_seed(master, run); }

namespace {

constexpr const char* kNotConverged = "dc_not_converged";
constexpr const char* kF0Cap = "f0_cap";
constexpr const char* kPaired = "paired_exclusion";

bool counts(const RunRecord& r) {
  return r.failure_code.empty() || r.failure_code == kNotConverged;
}

struct PointSpec {
  double axis;
  double t_max;
  double f_max;
};

RunRecord evaluate(const Scenario& s, Method m, const ExperimentConfig& cfg, bool timed) {
  RunRecord rec;
  rec.method = m;
  try {
    SolveReport rep;
    switch (m) {
      case Method::local: rep = local_baseline(s, cfg.gamma); break;
      case Method::dc: {
        DcParams p = cfg.dc;
        p.gamma = cfg.gamma;
        rep = solve_dc(s, p);
        if (!rep.converged) rec.failure_code = kNotConverged;
        break;
      }
      case Method::two_step: {
        TwoStepParams p = cfg.two_step;
        p.gamma = cfg.gamma;
        rep = solve_two_step(s, p);
        break;
      }
      case Method::oracle: throw std::invalid_argument("oracle is not an experiment method");
    }
    rec.energy_j = rep.energy_j;
    rec.iterations = rep.iterations;
    rec.feasible = rep.feasibility.feasible();
    if (!rec.feasible) rec.failure_code = "infeasible";
    if (timed) rec.wall_time_s = rep.wall_time_s;
  } catch (const InfeasibleError&) {
    rec.failure_code = m == Method::dc ? "infeasible" : kF0Cap;
  } catch (const std::exception&) {
    rec.failure_code = "error";
  }
  return rec;
}

std::vector<RunRecord> run_point(const ExperimentConfig& cfg, const PointSpec& pt, std::size_t J,
                                 const std::vector<Method>& methods, bool timed, int jobs) {
  ScenarioConfig sc = cfg.scenario;
  sc.t_max_s = pt.t_max;
  sc.f_max_hz = pt.f_max;
  sc.num_offload = J;
  const std::size_t nm = methods.size();
  std::vector<RunRecord> out(cfg.runs * nm);
  const auto runs = static_cast<std::int64_t>(cfg.runs);

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::int64_t r = 0; r < runs; ++r) {
    const auto run = static_cast<std::size_t>(r);
    const std::uint64_t seed = run_seed(cfg.seed, run);
    const Scenario s = generate_scenario(sc, seed);
    bool exclude = false;
    for (std::size_t mi = 0; mi < nm; ++mi) {
      RunRecord rec = evaluate(s, methods[mi], cfg, timed);
      if (methods[mi] == Method::two_step && rec.failure_code == kF0Cap) exclude = true;
      rec.seed = seed;
      rec.num_offload = J;
      rec.t_max = pt.t_max;
      rec.f_max = pt.f_max;
      out[run * nm + mi] = std::move(rec);
    }
    if (exclude) {
      for (std::size_t mi = 0; mi < nm; ++mi) {
        auto& rec = out[run * nm + mi];
        if (methods[mi] != Method::two_step && counts(rec)) rec.failure_code = kPaired;
      }
    }
  }
  return out;
}

PointSummary summarize(const std::vector<RunRecord>& recs, double axis, std::size_t J, Method m) {
  PointSummary p;
  p.axis = axis;
  p.num_offload = J;
  p.method = m;
  KahanSum e, e2, w, it;
  for (const auto& r : recs) {
    if (r.method != m) continue;
    if (!counts(r)) {
      ++p.failures;
      continue;
    }
    if (r.failure_code == kNotConverged) ++p.flagged;
    ++p.runs;
    e.add(r.energy_j);
    w.add(r.wall_time_s);
    it.add(r.iterations);
  }
  if (p.runs == 0) {
    p.mean_energy_j = std::nan("");
    return p;
  }
  const double n = static_cast<double>(p.runs);
  p.mean_energy_j = e.value() / n;
  for (const auto& r : recs) {
    if (r.method != m || !counts(r)) continue;
    const double d = r.energy_j - p.mean_energy_j;
    e2.add(d * d);
  }
  p.std_error_j = p.runs > 1 ? std::sqrt(e2.value() / (n - 1.0) / n) : 0.0;
  p.mean_wall_time_s = w.value() / n;
  p.mean_iterations = it.value() / n;
  return p;
}

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

SweepResult run_sweep(const ExperimentConfig& cfg, std::string name,
                      const std::vector<PointSpec>& pts, const std::vector<std::size_t>& js,
                      const std::vector<Method>& methods, bool timed, int jobs) {
  cfg.validate();
  SweepResult res;
  res.axis_name = std::move(name);
  for (const auto& pt : pts) {
    res.axis.push_back(pt.axis);
    for (std::size_t J : js) {
      std::vector<RunRecord> recs = run_point(cfg, pt, J, methods, timed, jobs);
      for (Method m : methods) res.points.push_back(summarize(recs, pt.axis, J, m));
      res.records.insert(res.records.end(), std::make_move_iterator(recs.begin()),
                         std::make_move_iterator(recs.end()));
    }
  }
  return res;
}

}  // namespace

SweepResult sweep_tmax(const ExperimentConfig& cfg) {
  std::vector<PointSpec> pts;
  for (double t : cfg.t_max_grid) pts.push_back({t, t, cfg.scenario.f_max_hz});
  return run_sweep(cfg, "t_max", pts, cfg.j_values, cfg.methods, cfg.record_wall_time,
                   thread_count(cfg.jobs));
}

SweepResult sweep_fmax(const ExperimentConfig& cfg) {
  std::vector<PointSpec> pts;
  for (double f : cfg.f_max_grid) pts.push_back({f, cfg.fmax_sweep_t_max, f});
  return run_sweep(cfg, "f_max", pts, cfg.j_values, cfg.methods, cfg.record_wall_time,
                   thread_count(cfg.jobs));
}

SweepResult runtime_table(const ExperimentConfig& cfg) {
  std::vector<PointSpec> pts;
  for (double f : cfg.runtime_f_max) pts.push_back({f, cfg.runtime_t_max, f});
  // One thread so that timings are not disturbed by sibling runs.
  return run_sweep(cfg, "runtime", pts, cfg.runtime_j_values, {Method::dc, Method::two_step},
                   true, 1);
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(const SweepResult& r, std::ostream& out) {
  out << "seed,J,t_max,F_max,method,energy_J,wall_time_s,iterations,feasible,failure_code\n";
  for (const auto& rec : r.records) {
    out << rec.seed << ',' << rec.num_offload << ',' << num(rec.t_max) << ',' << num(rec.f_max)
        << ',' << to_string(rec.method) << ',' << num(rec.energy_j) << ','
        << num(rec.wall_time_s) << ',' << rec.iterations << ',' << (rec.feasible ? 1 : 0) << ','
        << rec.failure_code << '\n';
  }
}

void write_summary_json(const SweepResult& r, std::ostream& out) {
  nlohmann::json j;
  j["axis_name"] = r.axis_name;
  j["axis"] = r.axis;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) {
    pts.push_back({{"axis", p.axis},
                   {"J", p.num_offload},
                   {"method", std::string(to_string(p.method))},
                   {"mean_energy_J", p.mean_energy_j},
                   {"std_error_J", p.std_error_j},
                   {"runs", p.runs},
                   {"failures", p.failures},
                   {"flagged", p.flagged},
                   {"mean_wall_time_s", p.mean_wall_time_s},
                   {"mean_iterations", p.mean_iterations}});
  }
  j["points"] = pts;
  if (r.axis_name == "runtime") {
    nlohmann::json ratios = nlohmann::json::array();
    for (const auto& p : r.points) {
      if (p.method != Method::dc) continue;
      const PointSummary* t = r.find(p.axis, p.num_offload, Method::two_step);
      if (!t || !(t->mean_wall_time_s > 0.0)) continue;
      ratios.push_back({{"F_max", p.axis},
                        {"J", p.num_offload},
                        {"dc_over_two_step_time", p.mean_wall_time_s / t->mean_wall_time_s},
                        {"dc_iterations", p.mean_iterations},
                        {"two_step_p2_solves", t->mean_iterations}});
    }
    j["ratios"] = ratios;
  }
  out << j.dump(2) << '\n';
}

}  // namespace fogalloc
