// fogalloc: single-scenario solves, experiment sweeps and the validation suite.
//
// Precedence for every setting: command-line flag > config file > built-in default.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "fogalloc/channel.hpp"
#include "fogalloc/config.hpp"
#include "fogalloc/dc_method.hpp"
#include "fogalloc/experiments.hpp"
#include "fogalloc/logging.hpp"
#include "fogalloc/two_step.hpp"
#include "fogalloc/validation.hpp"

using namespace fogalloc;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> jobs;
  std::string method;
};

Config resolve(const Flags& f) {
  Config c = f.config.empty() ? Config{} : load_config(f.config);
  if (f.seed) c.experiment.seed = *f.seed;
  if (f.jobs) {
    if (*f.jobs < 0) throw ConfigError("--jobs must be nonnegative");
    c.experiment.jobs = *f.jobs;
  }
  if (!f.method.empty()) set_method(c, f.method);
  if (!f.out.empty()) c.csv_path = f.out;
  return c;
}

json allocation_json(const Allocation& a) {
  return {{"power_W", a.power_w}, {"bits", a.bits}, {"freq_Hz", a.freq_hz}, {"t_up_s", a.t_up_s}};
}

json report_json(const SolveReport& r) {
  json j{{"method", std::string(to_string(r.method))},
         {"energy_J", r.energy_j},
         {"feasible", r.feasibility.feasible()},
         {"worst_violation", r.feasibility.worst_violation},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"wall_time_s", r.wall_time_s},
         {"allocation", allocation_json(r.allocation)}};
  json repairs = json::array();
  for (const auto& e : r.repairs) {
    repairs.push_back({{"device", e.device},
                       {"f_star_Hz", e.f_star},
                       {"b_plus_bits", e.b_plus},
                       {"remaining_bits", e.remaining_b},
                       {"remaining_pmax_W", e.remaining_pmax}});
  }
  j["repairs"] = repairs;
  if (r.method == Method::dc) {
    j["trace"] = {{"h_values_J", r.trace.h_values},
                  {"subproblem_statuses", r.trace.subproblem_statuses},
                  {"stalled", r.trace.stalled}};
  }
  return j;
}

json scenario_json(const Scenario& s) {
  return {{"bits", s.task.bits},
          {"cycles_per_bit", s.task.cycles_per_bit},
          {"t_max_s", s.task.t_max},
          {"bandwidth_Hz", s.radio.bandwidth_hz},
          {"noise_W", s.radio.noise_w},
          {"p_max_W", s.radio.p_max_w},
          {"kappa", s.caps.kappa},
          {"f_max_Hz", s.caps.f_max_hz},
          {"gains", s.gains}};
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path + ": cannot open for writing");
  write(f);
}

int cmd_solve(const Flags& flags) {
  const Config c = resolve(flags);
  const ExperimentConfig& x = c.experiment;
  const Scenario s = generate_scenario(x.scenario, x.seed);
  std::vector<Method> methods;
  if (c.method == "local") methods = {Method::local};
  if (c.method == "dc") methods = {Method::dc};
  if (c.method == "two-step") methods = {Method::two_step};
  if (c.method == "both") methods = {Method::dc, Method::two_step};

  json reports = json::array();
  bool infeasible = false;
  std::optional<double> e_dc, e_ts;
  for (Method m : methods) {
    try {
      SolveReport r;
      if (m == Method::local) r = local_baseline(s, x.gamma);
      if (m == Method::dc) {
        DcParams p = x.dc;
        p.gamma = x.gamma;
        r = solve_dc(s, p);
        e_dc = r.energy_j;
      }
      if (m == Method::two_step) {
        TwoStepParams p = x.two_step;
        p.gamma = x.gamma;
        r = solve_two_step(s, p);
        e_ts = r.energy_j;
      }
      if (!r.feasibility.feasible()) infeasible = true;
      reports.push_back(report_json(r));
    } catch (const InfeasibleError& e) {
      infeasible = true;
      reports.push_back({{"method", std::string(to_string(m))}, {"error", e.what()}});
    }
  }
  if (e_dc && e_ts && *e_ts > *e_dc) {
    log_warn("two-step energy " + std::to_string(*e_ts) + " J exceeds DC energy " +
             std::to_string(*e_dc) + " J on this scenario");
  }
  const json out{{"seed", x.seed}, {"scenario", scenario_json(s)}, {"reports", reports}};
  emit(flags.out, [&](std::ostream& o) { o << out.dump(2) << '\n'; });
  return infeasible ? kExitInfeasible : 0;
}

int cmd_experiment(const Flags& flags, SweepResult (*run)(const ExperimentConfig&)) {
  const Config c = resolve(flags);
  const SweepResult r = run(c.experiment);
  emit(c.csv_path, [&](std::ostream& o) { write_csv(r, o); });
  if (!c.summary_path.empty()) {
    emit(c.summary_path, [&](std::ostream& o) { write_summary_json(r, o); });
  }
  std::size_t failures = 0;
  for (const auto& p : r.points) failures += p.failures;
  if (failures > 0) log_warn(std::to_string(failures) + " runs failed; see failure_code column");
  return 0;
}

int cmd_validate(const Flags& flags) {
  ValidationOptions o;
  const Config c = resolve(flags);
  if (flags.seed) o.seed = *flags.seed;
  o.jobs = c.experiment.jobs;
  const std::vector<CheckResult> checks = run_validation(o);
  print_checks(checks, std::cout);
  return all_passed(checks) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Energy-optimal task partitioning across D2D offloading devices"};
  app.require_subcommand(1);
  Flags flags;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--out", flags.out, "Output path (default stdout)");
    sub->add_option("--jobs", flags.jobs, "Worker threads (0 = all logical cores)");
    sub->add_option("--method", flags.method, "local, dc, two-step or both")
        ->check(CLI::IsMember({"local", "dc", "two-step", "both"}));
  };
  CLI::App* solve = app.add_subcommand("solve", "Solve one generated scenario, print a JSON report");
  CLI::App* tmax = app.add_subcommand("sweep-tmax", "Energy versus deadline, CSV per run");
  CLI::App* fmax = app.add_subcommand("sweep-fmax", "Energy versus F_max, CSV per run");
  CLI::App* runtime = app.add_subcommand("runtime", "DC versus two-step wall-clock table");
  CLI::App* validate = app.add_subcommand("validate", "Run the invariant suite");
  for (CLI::App* sub : {solve, tmax, fmax, runtime, validate}) common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return cmd_solve(flags);
    if (*tmax) return cmd_experiment(flags, sweep_tmax);
    if (*fmax) return cmd_experiment(flags, sweep_fmax);
    if (*runtime) return cmd_experiment(flags, runtime_table);
    if (*validate) return cmd_validate(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
