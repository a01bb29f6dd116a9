#include "fogalloc/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fogalloc/model.hpp"

namespace fogalloc {

void KahanSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

namespace {

void check(const McOptions& o) {
  if (o.samples == 0 || o.block == 0) throw std::invalid_argument("Monte Carlo needs samples");
}

std::size_t num_blocks(const McOptions& o) { return (o.samples + o.block - 1) / o.block; }

std::size_t block_len(const McOptions& o, std::size_t blk) {
  const std::size_t start = blk * o.block;
  return std::min(o.block, o.samples - start);
}

// Runs `body(block, rng, count)` for each block and stores its result in
// out[block]; the reduction over `out` is left to the caller.
template <typename Body, typename T>
void for_blocks(const McOptions& o, std::uint64_t stream, std::vector<T>& out, Body body) {
  const auto nb = static_cast<std::int64_t>(num_blocks(o));
  out.assign(static_cast<std::size_t>(nb), T{});
  const std::uint64_t base = derive_seed(o.seed, stream);
  if (o.exec == Execution::serial) {
    for (std::int64_t b = 0; b < nb; ++b) {
      const auto blk = static_cast<std::size_t>(b);
      Rng rng = make_rng(base, blk);
      out[blk] = body(rng, block_len(o, blk));
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b) {
      const auto blk = static_cast<std::size_t>(b);
      Rng rng = make_rng(base, blk);
      out[blk] = body(rng, block_len(o, blk));
    }
  }
}

double success_for_stream(double bits, double freq, double window, const ThrottleModel& model,
                          double c, const McOptions& o, std::uint64_t stream) {
  check(o);
  if (bits <= 0.0) return 1.0;
  if (!(freq > 0.0) || !(window > 0.0)) return 0.0;
  const double cycles = bits * c;
  std::vector<std::uint64_t> hits;
  for_blocks(o, stream, hits, [&](Rng& rng, std::size_t n) {
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = model.sample(rng);
      if (cycles / ((1.0 - xi) * freq) <= window) ++h;
    }
    return h;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return static_cast<double>(total) / static_cast<double>(o.samples);
}

}  // namespace

double deadline_success_rate(double bits, double freq, double window, const ThrottleModel& model,
                             double cycles_per_bit, const McOptions& opts) {
  return success_for_stream(bits, freq, window, model, cycles_per_bit, opts, 0);
}

std::vector<double> success_rates(const Allocation& a, const Scenario& s, const McOptions& opts) {
  const double T = s.task.t_max;
  const double c = s.task.cycles_per_bit;
  std::vector<double> out(s.num_devices());
  out[0] = success_for_stream(a.bits[0], a.freq_hz[0], T, s.throttle[0], c, opts, 0);
  for (std::size_t j = 1; j < s.num_devices(); ++j) {
    out[j] = success_for_stream(a.bits[j], a.freq_hz[j], T - a.t_up_s[j - 1], s.throttle[j], c,
                                opts, j);
  }
  return out;
}

double mean_realized_energy(const Allocation& a, const Scenario& s, const McOptions& opts) {
  check(opts);
  const std::size_t n = s.num_devices();
  std::vector<double> partial;
  for_blocks(opts, 0, partial, [&](Rng& rng, std::size_t len) {
    std::vector<double> xi(n);
    KahanSum sum;
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t d = 0; d < n; ++d) xi[d] = s.throttle[d].sample(rng);
      sum.add(realized_energy(a, s, xi));
    }
    return sum.value();
  });
  KahanSum total;
  for (double p : partial) total.add(p);
  return total.value() / static_cast<double>(opts.samples);
}

}  // namespace fogalloc
