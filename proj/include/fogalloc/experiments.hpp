#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fogalloc/channel.hpp"
#include "fogalloc/dc_method.hpp"
#include "fogalloc/report.hpp"
#include "fogalloc/two_step.hpp"

namespace fogalloc {

struct ExperimentConfig {
  ScenarioConfig scenario;
  double gamma = 0.95;
  DcParams dc;
  TwoStepParams two_step;
  std::vector<Method> methods{Method::local, Method::dc, Method::two_step};
  std::vector<std::size_t> j_values{1, 2, 3};
  std::vector<double> t_max_grid{0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> f_max_grid{5e7, 7.5e7, 1e8, 1.25e8, 1.5e8};
  double fmax_sweep_t_max = 1.0;
  std::vector<double> runtime_f_max{4e7, 1e8};
  std::vector<std::size_t> runtime_j_values{1, 2, 3};
  double runtime_t_max = 0.4;
  std::size_t runs = 200;
  std::uint64_t seed = 1;
  int jobs = 0;                    // 0: all available threads
  bool record_wall_time = false;   // wall times make CSV output non-reproducible

  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// One (run, point, method) evaluation. `seed` is the scenario seed.
struct RunRecord {
  std::uint64_t seed = 0;
  std::size_t num_offload = 0;
  double t_max = 0.0;
  double f_max = 0.0;
  Method method = Method::local;
  double energy_j = 0.0;
  double wall_time_s = 0.0;
  int iterations = 0;
  bool feasible = false;
  std::string failure_code;  // empty on success
};

/// Aggregate over the successful runs of one (point, J, method).
struct PointSummary {
  double axis = 0.0;
  std::size_t num_offload = 0;
  Method method = Method::local;
  double mean_energy_j = 0.0;
  double std_error_j = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::size_t flagged = 0;  // DC runs stopped by k_max or a stall
  double mean_wall_time_s = 0.0;
  double mean_iterations = 0.0;
};

struct SweepResult {
  std::string axis_name;  // "t_max", "f_max" or "runtime"
  std::vector<double> axis;
  std::vector<RunRecord> records;
  std::vector<PointSummary> points;

  /// nullptr if absent.
  const PointSummary* find(double axis_value, std::size_t num_offload, Method m) const;
};

/// Deadline sweep with f_max ~ U(F_min, F_max) from the scenario config.
SweepResult sweep_tmax(const ExperimentConfig& cfg);

/// F_max sweep at t_max = cfg.fmax_sweep_t_max.
SweepResult sweep_fmax(const ExperimentConfig& cfg);

/// Wall-clock comparison of DC and two-step over runtime_f_max x
/// runtime_j_values at runtime_t_max. Always records wall times. The axis is
/// the F_max value.
SweepResult runtime_table(const ExperimentConfig& cfg);

/// Scenario seed of Monte Carlo run r; shared by every grid point and J.
std::uint64_t run_seed(std::uint64_t master, std::size_t run);

/// Column order: seed,J,t_max,F_max,method,energy_J,wall_time_s,iterations,feasible,failure_code
void write_csv(const SweepResult& r, std::ostream& out);
void write_summary_json(const SweepResult& r, std::ostream& out);

}  // namespace fogalloc
