#include "fogalloc/dcf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fogalloc {

std::vector<double> DcLayout::pack(const Allocation& a) const {
  if (!a.consistent_with(num_offload)) throw std::invalid_argument("allocation size mismatch");
  std::vector<double> x(size(), 0.0);
  for (std::size_t j = 0; j < num_offload; ++j) {
    x[p(j)] = a.power_w[j];
    x[t(j)] = a.t_up_s[j];
  }
  for (std::size_t i = 0; i <= num_offload; ++i) {
    x[b(i)] = a.bits[i];
    x[f(i)] = a.freq_hz[i];
  }
  return x;
}

Allocation DcLayout::unpack(std::span<const double> x) const {
  if (x.size() != size()) throw std::invalid_argument("DC vector size mismatch");
  Allocation a = Allocation::zeros(num_offload);
  for (std::size_t j = 0; j < num_offload; ++j) {
    a.power_w[j] = x[p(j)];
    a.t_up_s[j] = x[t(j)];
  }
  for (std::size_t i = 0; i <= num_offload; ++i) {
    a.bits[i] = x[b(i)];
    a.freq_hz[i] = x[f(i)];
  }
  return a;
}

DcScales DcScales::from(const Scenario& s, const ChanceConstants& k) {
  DcScales sc;
  sc.bits = s.task.bits;
  sc.time = s.task.t_max;
  sc.freq.push_back(
      std::min(s.caps.f_max_hz[0], s.task.bits * s.task.cycles_per_bit /
                                       (s.task.t_max * (1.0 - k.inv_cdf_gamma[0]))));
  for (std::size_t j = 1; j < s.num_devices(); ++j) sc.freq.push_back(s.caps.f_max_hz[j]);
  return sc;
}

namespace {

void zero(std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); }

void check_rate(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("frozen rate must be positive");
}

}  // namespace

DcfPair dcf_upload(const DcLayout& layout, std::vector<double> frozen_rates) {
  if (frozen_rates.size() != layout.num_offload) throw std::invalid_argument("rate count");
  for (double r : frozen_rates) check_rate(r);
  DcfPair pair;
  pair.y = [layout, rates = frozen_rates](std::span<const double> x, std::span<double> g) {
    zero(g);
    double v = 0.0;
    for (std::size_t j = 0; j < layout.num_offload; ++j) {
      const double u = x[layout.p(j)] + x[layout.b(j + 1)] / (2.0 * rates[j]);
      v += u * u;
      if (!g.empty()) {
        g[layout.p(j)] = 2.0 * u;
        g[layout.b(j + 1)] = u / rates[j];
      }
    }
    return v;
  };
  pair.z = [layout, rates = std::move(frozen_rates)](std::span<const double> x,
                                                      std::span<double> g) {
    zero(g);
    double v = 0.0;
    for (std::size_t j = 0; j < layout.num_offload; ++j) {
      const double p = x[layout.p(j)];
      const double b = x[layout.b(j + 1)];
      const double r2 = rates[j] * rates[j];
      v += p * p + b * b / (4.0 * r2);
      if (!g.empty()) {
        g[layout.p(j)] = 2.0 * p;
        g[layout.b(j + 1)] = b / (2.0 * r2);
      }
    }
    return v;
  };
  return pair;
}

DcfPair dcf_compute_energy(const DcLayout& layout, const Scenario& s, const ChanceConstants& k,
                           const DcScales& scales) {
  const std::size_t n = layout.num_offload + 1;
  std::vector<double> w(n), a(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * s.caps.kappa * s.task.cycles_per_bit * k.eta.at(i);
    a[i] = scales.freq.at(i) / std::sqrt(scales.bits);
  }
  DcfPair pair;
  pair.y = [layout, w, a](std::span<const double> x, std::span<double> g) {
    zero(g);
    double v = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double b = x[layout.b(i)];
      const double f = x[layout.f(i)];
      const double u = a[i] * b + f * f / a[i];
      v += w[i] * u * u;
      if (!g.empty()) {
        g[layout.b(i)] = 2.0 * w[i] * u * a[i];
        g[layout.f(i)] = 2.0 * w[i] * u * 2.0 * f / a[i];
      }
    }
    return v;
  };
  pair.z = [layout, w, a](std::span<const double> x, std::span<double> g) {
    zero(g);
    double v = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double b = x[layout.b(i)];
      const double f = x[layout.f(i)];
      const double a2 = a[i] * a[i];
      v += w[i] * (a2 * b * b + f * f * f * f / a2);
      if (!g.empty()) {
        g[layout.b(i)] = w[i] * 2.0 * a2 * b;
        g[layout.f(i)] = w[i] * 4.0 * f * f * f / a2;
      }
    }
    return v;
  };
  return pair;
}

DcfPair dcf_equality(const DcLayout& layout, std::size_t j, double frozen_rate,
                     const DcScales& scales) {
  check_rate(frozen_rate);
  if (j >= layout.num_offload) throw std::out_of_range("dcf_equality: offloader index");
  const double sigma = 1.0 / std::sqrt(scales.bits * frozen_rate);
  const double c = 1.0 / (sigma * frozen_rate);
  const std::size_t ib = layout.b(j + 1);
  const std::size_t it = layout.t(j);
  DcfPair pair;
  pair.y = [ib, sigma, c](std::span<const double> x, std::span<double> g) {
    zero(g);
    const double u = sigma * x[ib] + c;
    if (!g.empty()) g[ib] = u * sigma;
    return 0.5 * u * u;
  };
  pair.z = [ib, it, sigma, c](std::span<const double> x, std::span<double> g) {
    zero(g);
    const double sb = sigma * x[ib];
    if (!g.empty()) {
      g[ib] = sigma * sb;
      g[it] = 1.0;
    }
    return 0.5 * (sb * sb + c * c) + x[it];
  };
  return pair;
}

DcfPair dcf_chance_local(const DcLayout& layout, const ChanceConstants& k) {
  const double ln_q = std::log(k.q.at(0));
  const std::size_t ib = layout.b(0);
  const std::size_t jf = layout.f(0);
  DcfPair pair;
  pair.y = [jf](std::span<const double> x, std::span<double> g) {
    zero(g);
    const double f = x[jf];
    if (!(f > 0.0)) throw std::domain_error("local chance constraint needs f0 > 0");
    if (!g.empty()) g[jf] = -1.0 / f;
    return -std::log(f);
  };
  pair.z = [ib, ln_q](std::span<const double> x, std::span<double> g) {
    zero(g);
    const double b = x[ib];
    if (!(b > 0.0)) throw std::domain_error("local chance constraint needs b0 > 0");
    if (!g.empty()) g[ib] = -1.0 / b;
    return -std::log(b) + ln_q;
  };
  return pair;
}

DcfPair dcf_chance_offload(const DcLayout& layout, std::size_t j, const ChanceConstants& k,
                           const TaskSpec& task, const DcScales& scales) {
  if (j >= layout.num_offload) throw std::out_of_range("dcf_chance_offload: offloader index");
  const double q = k.q.at(j + 1);
  const double qt = q / task.t_max;
  const double beta = std::sqrt(scales.freq.at(j + 1) / scales.time);
  const std::size_t ib = layout.b(j + 1);
  const std::size_t jf = layout.f(j + 1);
  const std::size_t it = layout.t(j);
  DcfPair pair;
  pair.y = [=](std::span<const double> x, std::span<double> g) {
    zero(g);
    const double u = beta * x[it] + x[jf] / beta;
    if (!g.empty()) {
      g[it] = qt * u * beta;
      g[jf] = qt * u / beta;
      g[ib] = 1.0;
    }
    return 0.5 * qt * u * u + x[ib];
  };
  pair.z = [=](std::span<const double> x, std::span<double> g) {
    zero(g);
    const double bt = beta * x[it];
    const double fb = x[jf] / beta;
    if (!g.empty()) {
      g[it] = qt * bt * beta;
      g[jf] = qt * fb / beta + q;
    }
    return 0.5 * qt * (bt * bt + fb * fb) + q * x[jf];
  };
  return pair;
}

double PenalizedObjective::y_lambda(std::span<const double> x, std::span<double> grad) const {
  const std::size_t n = layout.size();
  if (grad.empty()) {
    double v = upload.y(x, {}) + compute.y(x, {});
    for (std::size_t j = 0; j < layout.num_offload; ++j) v += 2.0 * lambda * x[layout.s(j)];
    return v;
  }
  std::vector<double> tmp(n);
  double v = upload.y(x, grad);
  v += compute.y(x, tmp);
  for (std::size_t i = 0; i < n; ++i) grad[i] += tmp[i];
  for (std::size_t j = 0; j < layout.num_offload; ++j) {
    v += 2.0 * lambda * x[layout.s(j)];
    grad[layout.s(j)] += 2.0 * lambda;
  }
  return v;
}

double PenalizedObjective::z_lambda(std::span<const double> x, std::span<double> grad) const {
  const std::size_t n = layout.size();
  if (grad.empty()) {
    double v = upload.z(x, {}) + compute.z(x, {});
    for (const auto& eq : equalities) v += lambda * (eq.y(x, {}) + eq.z(x, {}));
    return v;
  }
  std::vector<double> tmp(n);
  double v = upload.z(x, grad);
  v += compute.z(x, tmp);
  for (std::size_t i = 0; i < n; ++i) grad[i] += tmp[i];
  for (const auto& eq : equalities) {
    v += lambda * eq.y(x, tmp);
    for (std::size_t i = 0; i < n; ++i) grad[i] += lambda * tmp[i];
    v += lambda * eq.z(x, tmp);
    for (std::size_t i = 0; i < n; ++i) grad[i] += lambda * tmp[i];
  }
  return v;
}

double PenalizedObjective::value(std::span<const double> x) const {
  double v = energy(x);
  for (const auto& eq : equalities) v += lambda * std::abs(eq.value(x));
  return v;
}

double PenalizedObjective::energy(std::span<const double> x) const {
  return upload.value(x) + compute.value(x);
}

PenalizedObjective penalized_objective(const Scenario& s, const ChanceConstants& k,
                                       double lambda, const std::vector<double>& frozen_rates,
                                       const DcScales& scales) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("penalty parameter must be nonnegative");
  PenalizedObjective h;
  h.layout = DcLayout{s.num_offload()};
  h.lambda = lambda;
  h.upload = dcf_upload(h.layout, frozen_rates);
  h.compute = dcf_compute_energy(h.layout, s, k, scales);
  for (std::size_t j = 0; j < s.num_offload(); ++j) {
    h.equalities.push_back(dcf_equality(h.layout, j, frozen_rates.at(j), scales));
  }
  return h;
}

double Tangent::operator()(std::span<const double> x) const {
  double v = value;
  for (std::size_t i = 0; i < grad.size(); ++i) v += grad[i] * (x[i] - at[i]);
  return v;
}

Tangent tangent(const SmoothFn& fn, std::span<const double> xk) {
  Tangent t;
  t.at.assign(xk.begin(), xk.end());
  t.grad.assign(xk.size(), 0.0);
  t.value = fn(xk, t.grad);
  return t;
}

SmoothFn linearize(const DcfPair& pair, std::span<const double> xk) {
  Tangent zt = tangent(pair.z, xk);
  return [y = pair.y, zt = std::move(zt)](std::span<const double> x, std::span<double> g) {
    const double v = y(x, g) - zt(x);
    if (!g.empty()) {
      for (std::size_t i = 0; i < zt.grad.size(); ++i) g[i] -= zt.grad[i];
    }
    return v;
  };
}

}  // namespace fogalloc
