#include <doctest.h>

#include <cmath>

#include "fogalloc/dcf.hpp"
#include "support.hpp"

using namespace fogalloc;
using doctest::Approx;

namespace {

struct Fixture {
  Scenario s = testing::table_one(19, 3, 0.6);
  ChanceConstants k = ChanceConstants::build(s.throttle, s.task, 0.95);
  DcLayout L{3};
  DcScales sc = DcScales::from(s, k);
  Rng rng = make_rng(19, 99);

  std::vector<double> point() {
    std::vector<double> x(L.size());
    for (std::size_t j = 0; j < 3; ++j) {
      x[L.p(j)] = uniform(rng, 1e-3, 0.2);
      x[L.t(j)] = uniform(rng, 1e-3, 0.6);
      x[L.s(j)] = uniform(rng, 0.0, 1.0);
    }
    for (std::size_t i = 0; i < 4; ++i) {
      x[L.b(i)] = uniform(rng, 1e-3, 1.0) * s.task.bits;
      x[L.f(i)] = uniform(rng, 1e-3, 1.0) * s.caps.f_max_hz[i];
    }
    return x;
  }

  std::vector<double> rates(const std::vector<double>& x) const {
    std::vector<double> r;
    for (std::size_t j = 0; j < 3; ++j) {
      r.push_back(testing::shannon(x[L.p(j)], s.gains[j], s.radio.bandwidth_hz, s.radio.noise_w));
    }
    return r;
  }
};

double rel(double a, double b, double mag) { return std::abs(a - b) / mag; }

// Central-difference check of an analytic gradient, relative per coordinate.
void check_gradient(const SmoothFn& fn, const std::vector<double>& x) {
  std::vector<double> g(x.size());
  const double f0 = fn(x, g);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(std::abs(x[i]), 1e-3);
    std::vector<double> xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (fn(xp, {}) - fn(xm, {})) / (2 * h);
    CHECK(std::abs(fd - g[i]) <= 1e-5 * (std::abs(g[i]) + std::abs(f0) / std::max(std::abs(x[i]), 1e-3)));
  }
}

void check_midpoint_convex(const SmoothFn& fn, const std::vector<double>& a,
                           const std::vector<double>& b) {
  std::vector<double> m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  const double lhs = fn(m, {});
  const double rhs = 0.5 * (fn(a, {}) + fn(b, {}));
  CHECK(lhs <= rhs + 1e-12 * std::abs(rhs));
}

}  // namespace

TEST_CASE("pack and unpack are inverse") {
  Fixture fx;
  Allocation a = Allocation::zeros(3);
  a.power_w = {0.01, 0.02, 0.03};
  a.bits = {1, 2, 3, 4};
  a.freq_hz = {5, 6, 7, 8};
  a.t_up_s = {0.1, 0.2, 0.3};
  const Allocation b = fx.L.unpack(fx.L.pack(a));
  CHECK(b.power_w == a.power_w);
  CHECK(b.bits == a.bits);
  CHECK(b.freq_hz == a.freq_hz);
  CHECK(b.t_up_s == a.t_up_s);
}

TEST_CASE("decompositions reproduce their targets") {
  Fixture fx;
  const double c = fx.s.task.cycles_per_bit, T = fx.s.task.t_max;
  const double q = T * (1 - testing::kQuantile95) / c;
  for (int n = 0; n < 200; ++n) {
    const std::vector<double> x = fx.point();
    const std::vector<double> r = fx.rates(x);
    const auto& L = fx.L;
    double up = 0.0, ce = 0.0;
    for (std::size_t j = 0; j < 3; ++j) up += x[L.p(j)] * x[L.b(j + 1)] / r[j];
    for (std::size_t i = 0; i < 4; ++i) {
      ce += 1e-24 * c * testing::kEta * x[L.b(i)] * x[L.f(i)] * x[L.f(i)];
    }
    CHECK(rel(dcf_upload(L, r).value(x), up, up) <= 1e-9);
    CHECK(rel(dcf_compute_energy(L, fx.s, fx.k, fx.sc).value(x), ce, ce) <= 1e-9);
    const double lb = std::log(x[L.b(0)]), lf = std::log(x[L.f(0)]);
    CHECK(rel(dcf_chance_local(L, fx.k).value(x), lb - lf - std::log(q),
              std::abs(lb) + std::abs(lf)) <= 1e-9);
    for (std::size_t j = 0; j < 3; ++j) {
      const double b = x[L.b(j + 1)], t = x[L.t(j)], f = x[L.f(j + 1)];
      CHECK(rel(dcf_equality(L, j, r[j], fx.sc).value(x), b / r[j] - t, b / r[j] + t) <= 1e-9);
      CHECK(rel(dcf_chance_offload(L, j, fx.k, fx.s.task, fx.sc).value(x),
                q / T * t * f + b - q * f, q / T * t * f + b + q * f) <= 1e-9);
    }
  }
}

TEST_CASE("the compute-energy split is exact for any positive scaling") {
  Fixture fx;
  const std::vector<double> x = fx.point();
  const double base = dcf_compute_energy(fx.L, fx.s, fx.k, fx.sc).value(x);
  DcScales other = fx.sc;
  other.bits = 17.0;
  for (double& f : other.freq) f *= 3.7;
  CHECK(dcf_compute_energy(fx.L, fx.s, fx.k, other).value(x) == Approx(base).epsilon(1e-9));
}

TEST_CASE("parts are convex with correct gradients") {
  Fixture fx;
  const std::vector<double> a = fx.point(), b = fx.point();
  const std::vector<double> r = fx.rates(a);
  std::vector<DcfPair> pairs{dcf_upload(fx.L, r), dcf_compute_energy(fx.L, fx.s, fx.k, fx.sc),
                             dcf_chance_local(fx.L, fx.k)};
  for (std::size_t j = 0; j < 3; ++j) {
    pairs.push_back(dcf_equality(fx.L, j, r[j], fx.sc));
    pairs.push_back(dcf_chance_offload(fx.L, j, fx.k, fx.s.task, fx.sc));
  }
  for (const auto& p : pairs) {
    check_gradient(p.y, a);
    check_gradient(p.z, a);
    check_midpoint_convex(p.y, a, b);
    check_midpoint_convex(p.z, a, b);
  }
}

TEST_CASE("linearization is tangent and majorizes") {
  Fixture fx;
  const std::vector<double> xk = fx.point();
  const DcfPair p = dcf_compute_energy(fx.L, fx.s, fx.k, fx.sc);
  const SmoothFn lin = linearize(p, xk);
  CHECK(lin(xk, {}) == Approx(p.value(xk)).epsilon(1e-12));
  for (int n = 0; n < 50; ++n) {
    const std::vector<double> x = fx.point();
    CHECK(lin(x, {}) >= p.value(x) - 1e-12 * std::abs(p.value(x)));
  }
}

TEST_CASE("penalized objective pieces") {
  Fixture fx;
  std::vector<double> x = fx.point();
  const std::vector<double> r = fx.rates(x);
  const PenalizedObjective h = penalized_objective(fx.s, fx.k, 12.0, r, fx.sc);
  double eq = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    eq += std::abs(x[fx.L.b(j + 1)] / r[j] - x[fx.L.t(j)]);
  }
  const double energy = h.energy(x);
  CHECK(h.value(x) == Approx(energy + 12.0 * eq).epsilon(1e-9));
  // With s_j = max(Y_eq, Z_eq), Y_lambda - Z_lambda equals the penalized value.
  for (std::size_t j = 0; j < 3; ++j) {
    x[fx.L.s(j)] = std::max(h.equalities[j].y(x, {}), h.equalities[j].z(x, {}));
  }
  CHECK(h.y_lambda(x, {}) - h.z_lambda(x, {}) == Approx(h.value(x)).epsilon(1e-9));
}

TEST_CASE("log terms reject nonpositive arguments") {
  Fixture fx;
  std::vector<double> x = fx.point();
  x[fx.L.b(0)] = 0.0;
  CHECK_THROWS_AS(dcf_chance_local(fx.L, fx.k).value(x), std::domain_error);
  CHECK_THROWS(dcf_upload(fx.L, {1.0, 0.0, 1.0}));
}
