#include "fogalloc/oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "fogalloc/uncertainty.hpp"

namespace fogalloc {

void GridSpec::validate() const {
  if (n_b < 2 || n_p < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Best {
  double energy = kInf;
  std::uint64_t index = std::numeric_limits<std::uint64_t>::max();

  void offer(double e, std::uint64_t i) {
    if (e < energy || (e == energy && i < index)) {
      energy = e;
      index = i;
    }
  }
};

// Grid coordinates of a flat index: bits indices first, then power indices,
// the last power index varying fastest.
struct Point {
  std::size_t ib[2] = {0, 0};
  std::size_t ip[2] = {0, 0};
};

class Grid {
 public:
  Grid(const Scenario& s, double gamma, const GridSpec& g)
      : s_(s), g_(g), k_(ChanceConstants::build(s.throttle, s.task, gamma)), J_(s.num_offload()) {
    total_ = 1;
    for (std::size_t j = 0; j < J_; ++j) total_ *= static_cast<std::uint64_t>(g.n_b * g.n_p);
  }

  std::uint64_t size() const { return total_; }

  Point decode(std::uint64_t idx) const {
    Point p;
    for (std::size_t j = J_; j-- > 0;) {
      p.ip[j] = static_cast<std::size_t>(idx % g_.n_p);
      idx /= g_.n_p;
    }
    for (std::size_t j = J_; j-- > 0;) {
      p.ib[j] = static_cast<std::size_t>(idx % g_.n_b);
      idx /= g_.n_b;
    }
    return p;
  }

  // Expected energy at a grid point, +inf when infeasible.
  double energy(const Point& pt, Allocation* out = nullptr) const {
    const double T = s_.task.t_max;
    const double c = s_.task.cycles_per_bit;
    const double kc = s_.caps.kappa * c;
    std::size_t ib_sum = 0, ip_sum = 0;
    for (std::size_t j = 0; j < J_; ++j) {
      ib_sum += pt.ib[j];
      ip_sum += pt.ip[j];
    }
    if (ib_sum > g_.n_b - 1 || ip_sum > g_.n_p - 1) return kInf;
    const double db = s_.task.bits / static_cast<double>(g_.n_b - 1);
    const double dp = s_.radio.p_max_w / static_cast<double>(g_.n_p - 1);

    double e = 0.0;
    for (std::size_t j = 0; j < J_; ++j) {
      const double b = db * static_cast<double>(pt.ib[j]);
      const double p = dp * static_cast<double>(pt.ip[j]);
      double f = 0.0, t = 0.0;
      if (b > 0.0) {
        if (p <= 0.0) return kInf;
        const double r = s_.rate_to(j + 1, p);
        t = b / r;
        if (!(t < T)) return kInf;
        f = min_frequency(b, T - t, k_.inv_cdf_gamma[j + 1], c);
        if (f > s_.caps.f_max_hz[j + 1]) return kInf;
        e += p * t + kc * k_.eta[j + 1] * b * f * f;
      }
      if (out) {
        out->bits[j + 1] = b;
        out->power_w[j] = p;
        out->freq_hz[j + 1] = f;
        out->t_up_s[j] = t;
      }
    }
    const double b0 = db * static_cast<double>(g_.n_b - 1 - ib_sum);
    const double f0 = min_frequency(b0, T, k_.inv_cdf_gamma[0], c);
    if (f0 > s_.caps.f_max_hz[0]) return kInf;
    e += kc * k_.eta[0] * b0 * f0 * f0;
    if (out) {
      out->bits[0] = b0;
      out->freq_hz[0] = f0;
    }
    return e;
  }

 private:
  const Scenario& s_;
  GridSpec g_;
  ChanceConstants k_;
  std::size_t J_;
  std::uint64_t total_ = 1;
};

}  // namespace

SolveReport grid_search(const Scenario& s, double gamma, const GridSpec& grid, Execution exec) {
  s.validate();
  grid.validate();
  if (s.num_offload() > 2) throw std::invalid_argument("grid search supports at most 2 offloaders");
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g(s, gamma, grid);
  const auto n = static_cast<std::int64_t>(g.size());

  Best best;
  if (exec == Execution::serial) {
    for (std::int64_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      best.offer(g.energy(g.decode(idx)), idx);
    }
  } else {
#pragma omp parallel
    {
      Best local;
#pragma omp for schedule(static)
      for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        local.offer(g.energy(g.decode(idx)), idx);
      }
#pragma omp critical(fogalloc_grid_merge)
      best.offer(local.energy, local.index);
    }
  }
  if (!std::isfinite(best.energy)) throw InfeasibleError("no feasible grid point");

  SolveReport rep;
  rep.method = Method::oracle;
  rep.allocation = Allocation::zeros(s.num_offload());
  g.energy(g.decode(best.index), &rep.allocation);
  rep.energy_j = expected_total_energy(rep.allocation, s);
  rep.feasibility = check_feasibility(rep.allocation, s, gamma);
  rep.iterations = static_cast<int>(std::min<std::int64_t>(n, std::numeric_limits<int>::max()));
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace fogalloc
