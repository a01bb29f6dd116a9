// Serial reference against the OpenMP kernels. Results are identical by
// construction; only the timings differ.

#include <benchmark/benchmark.h>

#include "fogalloc/channel.hpp"
#include "fogalloc/monte_carlo.hpp"
#include "fogalloc/oracle.hpp"
#include "fogalloc/two_step.hpp"

namespace {

using fogalloc::Execution;

fogalloc::Scenario scenario(std::size_t J) {
  fogalloc::ScenarioConfig c;
  c.num_offload = J;
  c.t_max_s = 1.0;
  return fogalloc::generate_scenario(c, 42);
}

void grid_search(benchmark::State& st, Execution exec) {
  const fogalloc::Scenario s = scenario(1);
  const fogalloc::GridSpec grid{201, 101};
  for (auto _ : st) benchmark::DoNotOptimize(fogalloc::grid_search(s, 0.95, grid, exec));
}

void success_rates(benchmark::State& st, Execution exec) {
  const fogalloc::Scenario s = scenario(3);
  const fogalloc::Allocation a = fogalloc::solve_two_step(s).allocation;
  fogalloc::McOptions o;
  o.samples = 200000;
  o.seed = 7;
  o.exec = exec;
  for (auto _ : st) benchmark::DoNotOptimize(fogalloc::success_rates(a, s, o));
}

void realized_energy(benchmark::State& st, Execution exec) {
  const fogalloc::Scenario s = scenario(3);
  const fogalloc::Allocation a = fogalloc::solve_two_step(s).allocation;
  fogalloc::McOptions o;
  o.samples = 200000;
  o.seed = 7;
  o.exec = exec;
  for (auto _ : st) benchmark::DoNotOptimize(fogalloc::mean_realized_energy(a, s, o));
}

}  // namespace

BENCHMARK_CAPTURE(grid_search, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid_search, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(success_rates, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(success_rates, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(realized_energy, serial, Execution::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(realized_energy, parallel, Execution::parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
