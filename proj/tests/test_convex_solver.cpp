#include <doctest.h>

#include <cmath>
#include <limits>

#include "fogalloc/convex_solver.hpp"

using namespace fogalloc;
using doctest::Approx;

namespace {

SmoothFn quadratic(double cx, double cy) {
  return [=](std::span<const double> x, std::span<double> g) {
    if (!g.empty()) {
      g[0] = 2 * (x[0] - cx);
      g[1] = 2 * (x[1] - cy);
    }
    return (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy);
  };
}

SmoothFn unit_disk() {
  return [](std::span<const double> x, std::span<double> g) {
    if (!g.empty()) {
      g[0] = 2 * x[0];
      g[1] = 2 * x[1];
    }
    return x[0] * x[0] + x[1] * x[1] - 1.0;
  };
}

}  // namespace

TEST_CASE("projection onto the unit disk") {
  ConvexProgram p;
  p.dim = 2;
  p.objective = quadratic(2.0, 2.0);
  p.inequalities.push_back(unit_disk());
  const std::vector<double> x0{0.0, 0.0};
  const SolverResult r = minimize(p, x0);
  REQUIRE(r.status == SolverStatus::converged);
  CHECK(r.x[0] == Approx(std::sqrt(0.5)).epsilon(1e-7));
  CHECK(r.x[1] == Approx(std::sqrt(0.5)).epsilon(1e-7));
  CHECK(r.kkt_residual <= 1e-6);
  for (std::size_t i = 1; i < r.stage_objectives.size(); ++i) {
    CHECK(r.stage_objectives[i] <= r.stage_objectives[i - 1] + 1e-12);
  }
}

TEST_CASE("equality constraint with infeasible start runs phase 1") {
  ConvexProgram p;
  p.dim = 2;
  p.objective = quadratic(2.0, 0.0);
  p.inequalities.push_back(unit_disk());
  p.add_equality({0.0, 1.0}, 0.0);
  const std::vector<double> x0{3.0, 3.0};
  const SolverResult r = minimize(p, x0);
  REQUIRE(r.status == SolverStatus::converged);
  CHECK(r.x[0] == Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(r.x[1]) < 1e-9);
}

TEST_CASE("bounds and fixed variables") {
  ConvexProgram p;
  p.dim = 2;
  p.objective = quadratic(-1.0, 5.0);
  p.lower = {0.0, 2.0};
  p.upper = {1.0, 2.0};
  const std::vector<double> x0{0.5, 2.0};
  const SolverResult r = minimize(p, x0);
  REQUIRE(r.status == SolverStatus::converged);
  CHECK(r.x[0] == Approx(0.0).epsilon(1e-8));
  CHECK(r.x[1] == 2.0);
}

TEST_CASE("empty interior is reported as infeasible") {
  ConvexProgram p;
  p.dim = 2;
  p.objective = quadratic(0.0, 0.0);
  p.inequalities.push_back(unit_disk());
  p.add_equality({1.0, 0.0}, 3.0);
  const std::vector<double> x0{0.0, 0.0};
  CHECK(minimize(p, x0).status == SolverStatus::infeasible);
  CHECK_FALSE(phase1_start(p, x0).feasible);

  ConvexProgram q;
  q.dim = 1;
  q.objective = [](std::span<const double> x, std::span<double> g) {
    if (!g.empty()) g[0] = 1.0;
    return x[0];
  };
  q.lower = {2.0};
  q.upper = {1.0};
  const std::vector<double> y0{1.5};
  CHECK(minimize(q, y0).status == SolverStatus::infeasible);
}

TEST_CASE("badly scaled variables are handled through the scale vector") {
  // min (x/1e8 - 0.3)^2 + (y/1e-3 - 0.2)^2 s.t. x/1e8 + y/1e-3 <= 0.4
  ConvexProgram p;
  p.dim = 2;
  p.objective = [](std::span<const double> x, std::span<double> g) {
    const double u = x[0] / 1e8 - 0.3, v = x[1] / 1e-3 - 0.2;
    if (!g.empty()) {
      g[0] = 2 * u / 1e8;
      g[1] = 2 * v / 1e-3;
    }
    return u * u + v * v;
  };
  p.inequalities.push_back([](std::span<const double> x, std::span<double> g) {
    if (!g.empty()) {
      g[0] = 1 / 1e8;
      g[1] = 1 / 1e-3;
    }
    return x[0] / 1e8 + x[1] / 1e-3 - 0.4;
  });
  p.scale = {1e8, 1e-3};
  const std::vector<double> x0{0.0, 0.0};
  const SolverResult r = minimize(p, x0);
  REQUIRE(r.status == SolverStatus::converged);
  CHECK(r.x[0] / 1e8 == Approx(0.25).epsilon(1e-6));
  CHECK(r.x[1] / 1e-3 == Approx(0.15).epsilon(1e-6));
}

TEST_CASE("never worse than a strictly feasible start") {
  ConvexProgram p;
  p.dim = 2;
  p.objective = quadratic(0.3, 0.1);
  p.inequalities.push_back(unit_disk());
  const std::vector<double> x0{0.3, 0.1};
  REQUIRE(strictly_feasible(p, x0));
  const SolverResult r = minimize(p, x0);
  CHECK(r.objective <= 1e-12);
}

TEST_CASE("phase 1 finds an interior point of a thin set") {
  ConvexProgram p;
  p.dim = 2;
  p.objective = quadratic(0.0, 0.0);
  p.inequalities.push_back([](std::span<const double> x, std::span<double> g) {
    if (!g.empty()) {
      g[0] = 2 * (x[0] - 5.0);
      g[1] = 2 * x[1];
    }
    return (x[0] - 5.0) * (x[0] - 5.0) + x[1] * x[1] - 1e-4;
  });
  const std::vector<double> guess{0.0, 0.0};
  const Phase1Result r = phase1_start(p, guess);
  REQUIRE(r.feasible);
  CHECK(strictly_feasible(p, r.x));
}
