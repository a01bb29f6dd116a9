#include "fogalloc/convex_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fogalloc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iter: return "max_iter";
    case SolverStatus::infeasible: return "infeasible";
    case SolverStatus::line_search_failed: return "line_search_failed";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bound_at(const std::vector<double>& v, std::size_t i, double fallback) {
  return v.empty() ? fallback : v[i];
}

bool is_fixed(const ConvexProgram& prog, std::size_t i) {
  const double lo = bound_at(prog.lower, i, -kInf);
  const double hi = bound_at(prog.upper, i, kInf);
  return std::isfinite(lo) && lo == hi;
}

void check_shape(const ConvexProgram& prog) {
  const std::size_t n = prog.dim;
  if (n == 0) throw std::invalid_argument("convex program needs at least one variable");
  if (!prog.objective) throw std::invalid_argument("convex program needs an objective");
  if (!prog.lower.empty() && prog.lower.size() != n) throw std::invalid_argument("lower size");
  if (!prog.upper.empty() && prog.upper.size() != n) throw std::invalid_argument("upper size");
  if (!prog.scale.empty() && prog.scale.size() != n) throw std::invalid_argument("scale size");
  if (prog.eq_rows.size() != prog.eq_rhs.size()) throw std::invalid_argument("eq rhs size");
  for (const auto& row : prog.eq_rows) {
    if (row.size() != n) throw std::invalid_argument("equality row size");
  }
  for (double s : prog.scale) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("scales must be positive");
  }
}

bool bounds_consistent(const ConvexProgram& prog) {
  for (std::size_t i = 0; i < prog.dim; ++i) {
    if (bound_at(prog.lower, i, -kInf) > bound_at(prog.upper, i, kInf)) return false;
  }
  return true;
}

// Free variables of a program in scaled coordinates y = x / scale.
class ScaledProblem {
 public:
  ScaledProblem(const ConvexProgram& prog, std::span<const double> x_init)
      : prog_(prog), base_x_(x_init.begin(), x_init.end()) {
    const std::size_t n = prog.dim;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_fixed(prog, i)) {
        base_x_[i] = prog.lower[i];
      } else {
        free_.push_back(i);
      }
    }
    nf_ = free_.size();
    m_ = prog.inequalities.size();
    s_.resize(nf_);
    ly_.resize(nf_);
    uy_.resize(nf_);
    for (std::size_t k = 0; k < nf_; ++k) {
      const std::size_t i = free_[k];
      s_[k] = prog.scale.empty() ? 1.0 : prog.scale[i];
      ly_[k] = bound_at(prog.lower, i, -kInf) / s_[k];
      uy_[k] = bound_at(prog.upper, i, kInf) / s_[k];
      if (std::isfinite(ly_[k])) ++num_bounds_;
      if (std::isfinite(uy_[k])) ++num_bounds_;
    }
    // Equalities restricted to free columns; fixed columns move to the rhs.
    std::vector<VectorXd> rows;
    std::vector<double> rhs;
    for (std::size_t r = 0; r < prog.eq_rows.size(); ++r) {
      VectorXd a(nf_);
      double d = prog.eq_rhs[r];
      for (std::size_t i = 0; i < n; ++i) {
        if (is_fixed(prog, i)) d -= prog.eq_rows[r][i] * base_x_[i];
      }
      for (std::size_t k = 0; k < nf_; ++k) a[k] = prog.eq_rows[r][free_[k]] * s_[k];
      if (a.lpNorm<Eigen::Infinity>() == 0.0) continue;
      rows.push_back(a);
      rhs.push_back(d);
    }
    A_.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(nf_));
    d_.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      A_.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      d_[static_cast<Eigen::Index>(r)] = rhs[r];
    }
    xbuf_ = base_x_;
    gbuf_.assign(n, 0.0);
  }

  std::size_t nf() const { return nf_; }
  std::size_t m() const { return m_; }
  std::size_t barrier_terms() const { return m_ + num_bounds_; }
  const MatrixXd& A() const { return A_; }
  const VectorXd& d() const { return d_; }
  const VectorXd& ly() const { return ly_; }
  const VectorXd& uy() const { return uy_; }

  VectorXd to_scaled(std::span<const double> x) const {
    VectorXd y(nf_);
    for (std::size_t k = 0; k < nf_; ++k) y[k] = x[free_[k]] / s_[k];
    return y;
  }

  std::vector<double> to_full(const VectorXd& y) const {
    std::vector<double> x = base_x_;
    for (std::size_t k = 0; k < nf_; ++k) x[free_[k]] = y[k] * s_[k];
    return x;
  }

  bool inside_bounds(const VectorXd& y) const {
    for (std::size_t k = 0; k < nf_; ++k) {
      if (!(y[k] > ly_[k] && y[k] < uy_[k])) return false;
    }
    return true;
  }

  // Values only. Returns false if anything is non-finite.
  bool values(const VectorXd& y, double& f0, VectorXd& g) const {
    load(y);
    f0 = prog_.objective(xbuf_, {});
    if (!std::isfinite(f0)) return false;
    g.resize(static_cast<Eigen::Index>(m_));
    for (std::size_t k = 0; k < m_; ++k) {
      g[k] = prog_.inequalities[k](xbuf_, {});
      if (!std::isfinite(g[k])) return false;
    }
    return true;
  }

  // Values and scaled gradients (G is m x nf).
  void gradients(const VectorXd& y, double& f0, VectorXd& gf, VectorXd& g, MatrixXd& G) const {
    load(y);
    f0 = call(prog_.objective, gf);
    g.resize(static_cast<Eigen::Index>(m_));
    G.resize(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(nf_));
    VectorXd row;
    for (std::size_t k = 0; k < m_; ++k) {
      g[k] = call(prog_.inequalities[k], row);
      G.row(static_cast<Eigen::Index>(k)) = row.transpose();
    }
  }

  // gf + sum_k w_k grad g_k, used for finite-difference curvature.
  VectorXd weighted_gradient(const VectorXd& y, const VectorXd& w) const {
    load(y);
    VectorXd out, row;
    call(prog_.objective, out);
    for (std::size_t k = 0; k < m_; ++k) {
      if (w[k] == 0.0) continue;
      call(prog_.inequalities[k], row);
      out += w[k] * row;
    }
    return out;
  }

  // f0 + mu * barrier, +inf outside the strict interior.
  double barrier(const VectorXd& y, double mu, double* f0_out = nullptr) const {
    if (!inside_bounds(y)) return kInf;
    double f0;
    VectorXd g;
    if (!values(y, f0, g)) return kInf;
    double phi = 0.0;
    for (std::size_t k = 0; k < m_; ++k) {
      if (!(g[k] < 0.0)) return kInf;
      phi -= std::log(-g[k]);
    }
    for (std::size_t k = 0; k < nf_; ++k) {
      if (std::isfinite(ly_[k])) phi -= std::log(y[k] - ly_[k]);
      if (std::isfinite(uy_[k])) phi -= std::log(uy_[k] - y[k]);
    }
    if (f0_out) *f0_out = f0;
    return f0 + mu * phi;
  }

  double objective_at(const VectorXd& y) const {
    load(y);
    return prog_.objective(xbuf_, {});
  }

 private:
  void load(const VectorXd& y) const {
    for (std::size_t k = 0; k < nf_; ++k) xbuf_[free_[k]] = y[k] * s_[k];
  }

  double call(const SmoothFn& fn, VectorXd& grad_scaled) const {
    std::fill(gbuf_.begin(), gbuf_.end(), 0.0);
    const double v = fn(xbuf_, gbuf_);
    grad_scaled.resize(static_cast<Eigen::Index>(nf_));
    for (std::size_t k = 0; k < nf_; ++k) grad_scaled[k] = gbuf_[free_[k]] * s_[k];
    return v;
  }

  const ConvexProgram& prog_;
  std::vector<double> base_x_;
  std::vector<std::size_t> free_;
  std::size_t nf_ = 0;
  std::size_t m_ = 0;
  std::size_t num_bounds_ = 0;
  VectorXd s_, ly_, uy_;
  MatrixXd A_;
  VectorXd d_;
  mutable std::vector<double> xbuf_;
  mutable std::vector<double> gbuf_;
};

// Least-norm correction so that A y = d.
void project_equalities(const ScaledProblem& P, VectorXd& y) {
  if (P.A().rows() == 0) return;
  const VectorXd r = P.A() * y - P.d();
  const MatrixXd AAt = P.A() * P.A().transpose();
  y -= P.A().transpose() * AAt.ldlt().solve(r);
}

struct BarrierRun {
  VectorXd y;
  double mu = 1.0;
  int iterations = 0;
  int fallbacks = 0;
  SolverStatus status = SolverStatus::converged;
  std::vector<double> stage_objectives;
  bool exited_early = false;
};

using EarlyExit = std::function<bool(const VectorXd&)>;

// Newton system of f0 + mu * barrier at y.
struct NewtonStep {
  VectorXd grad;   // barrier-augmented gradient
  VectorXd step;
  VectorXd gf;     // objective gradient
  VectorXd g;      // inequality values
  MatrixXd G;      // inequality gradients
  double decrement_sq = 0.0;
  bool fallback = false;
};

NewtonStep newton_step(const ScaledProblem& P, const VectorXd& y, double mu,
                       const SolverOptions& o) {
  const std::size_t nf = P.nf();
  const std::size_t m = P.m();
  const auto nfi = static_cast<Eigen::Index>(nf);
  const MatrixXd& A = P.A();

  NewtonStep ns;
  double f0;
  P.gradients(y, f0, ns.gf, ns.g, ns.G);
  VectorXd w(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) w[k] = 1.0 / (-ns.g[k]);

  ns.grad = ns.gf + mu * (ns.G.transpose() * w);
  VectorXd bound_curv = VectorXd::Zero(nfi);
  for (std::size_t k = 0; k < nf; ++k) {
    if (std::isfinite(P.ly()[k])) {
      const double gap = y[k] - P.ly()[k];
      ns.grad[k] -= mu / gap;
      bound_curv[k] += mu / (gap * gap);
    }
    if (std::isfinite(P.uy()[k])) {
      const double gap = P.uy()[k] - y[k];
      ns.grad[k] += mu / gap;
      bound_curv[k] += mu / (gap * gap);
    }
  }

  // Curvature of f0 + mu sum w_k g_k by central differences with the
  // weights frozen; the log-barrier outer products are exact.
  MatrixXd H(nfi, nfi);
  const VectorXd fd_weights = mu * w;
  for (std::size_t j = 0; j < nf; ++j) {
    double h = o.fd_step * std::max(1.0, std::abs(y[j]));
    if (std::isfinite(P.ly()[j])) h = std::min(h, 0.5 * (y[j] - P.ly()[j]));
    if (std::isfinite(P.uy()[j])) h = std::min(h, 0.5 * (P.uy()[j] - y[j]));
    VectorXd yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    H.col(static_cast<Eigen::Index>(j)) =
        (P.weighted_gradient(yp, fd_weights) - P.weighted_gradient(ym, fd_weights)) / (2.0 * h);
  }
  H = 0.5 * (H + H.transpose()).eval();
  for (std::size_t k = 0; k < m; ++k) {
    const VectorXd gk = ns.G.row(static_cast<Eigen::Index>(k)).transpose();
    H.noalias() += (mu * w[k] * w[k]) * gk * gk.transpose();
  }
  H.diagonal() += bound_curv;

  Eigen::LLT<MatrixXd> llt(H);
  if (llt.info() != Eigen::Success || !H.allFinite()) {
    ns.fallback = true;
    double tau = H.diagonal().cwiseAbs().mean();
    if (!std::isfinite(tau) || tau <= 0.0) tau = 1.0;
    H = MatrixXd::Identity(nfi, nfi) * tau;
    llt.compute(H);
  }

  if (A.rows() == 0) {
    ns.step = -llt.solve(ns.grad);
  } else {
    const VectorXd r_eq = P.d() - A * y;
    const VectorXd Hg = llt.solve(ns.grad);
    const MatrixXd HAt = llt.solve(A.transpose());
    const MatrixXd S = A * HAt;
    const VectorXd nu = S.ldlt().solve(-(r_eq + A * Hg));
    ns.step = -(Hg + HAt * nu);
  }
  ns.decrement_sq = -ns.grad.dot(ns.step);
  return ns;
}

BarrierRun run_barrier(const ScaledProblem& P, VectorXd y, const SolverOptions& o,
                       const EarlyExit& early_exit) {
  const double terms = static_cast<double>(std::max<std::size_t>(P.barrier_terms(), 1));

  BarrierRun run;
  run.mu = o.mu0;
  while (true) {
    const double mu = run.mu;
    while (true) {
      if (run.iterations >= o.max_newton_iters) {
        run.status = SolverStatus::max_iter;
        run.y = y;
        return run;
      }
      const NewtonStep ns = newton_step(P, y, mu, o);
      if (ns.fallback) ++run.fallbacks;
      const double dec = ns.decrement_sq;
      if (!std::isfinite(dec)) {
        run.status = SolverStatus::line_search_failed;
        run.y = y;
        return run;
      }
      if (0.5 * dec <= o.newton_tol) break;

      const double F0 = P.barrier(y, mu);
      double t = 1.0;
      VectorXd trial = y + ns.step;
      double Ft = P.barrier(trial, mu);
      int backtracks = 0;
      while (!(Ft <= F0 - o.ls_alpha * t * dec) && backtracks < 200) {
        t *= o.ls_beta;
        trial = y + t * ns.step;
        Ft = P.barrier(trial, mu);
        ++backtracks;
      }
      if (!(Ft <= F0 - o.ls_alpha * t * dec)) {
        // Round-off floor: treat a tiny decrement as centered.
        if (0.5 * dec <= 1e-8 * (1.0 + std::abs(F0))) break;
        run.status = SolverStatus::line_search_failed;
        run.y = y;
        return run;
      }
      y = trial;
      ++run.iterations;
      if (early_exit && early_exit(y)) {
        run.exited_early = true;
        run.y = y;
        return run;
      }
    }
    run.stage_objectives.push_back(P.objective_at(y));
    if (terms * run.mu < o.gap_tol) break;
    run.mu /= o.mu_factor;
  }
  run.y = y;
  return run;
}

// Relative KKT residual. Multipliers come from a least-squares fit over the
// constraints the barrier marks as active; barrier estimates mu / slack are
// too sensitive to round-off in slacks near zero.
double kkt_residual(const ScaledProblem& P, const VectorXd& y, double mu, double gap) {
  double f0;
  VectorXd gf, g;
  MatrixXd G;
  P.gradients(y, f0, gf, g, G);
  const double scale = 1.0 + gf.lpNorm<Eigen::Infinity>();
  const double cutoff = 1e-6 * scale;
  const auto nfi = static_cast<Eigen::Index>(P.nf());

  std::vector<VectorXd> cols;
  std::vector<double> slack;
  for (std::size_t k = 0; k < P.m(); ++k) {
    const VectorXd gk = G.row(static_cast<Eigen::Index>(k)).transpose();
    if (mu / (-g[k]) * gk.lpNorm<Eigen::Infinity>() >= cutoff) {
      cols.push_back(gk);
      slack.push_back(-g[k]);
    }
  }
  for (std::size_t k = 0; k < P.nf(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    if (std::isfinite(P.ly()[k]) && mu / (y[i] - P.ly()[k]) >= cutoff) {
      cols.push_back(-VectorXd::Unit(nfi, i));
      slack.push_back(y[i] - P.ly()[k]);
    }
    if (std::isfinite(P.uy()[k]) && mu / (P.uy()[k] - y[i]) >= cutoff) {
      cols.push_back(VectorXd::Unit(nfi, i));
      slack.push_back(P.uy()[k] - y[i]);
    }
  }
  const auto na = static_cast<Eigen::Index>(cols.size());
  const Eigen::Index ne = P.A().rows();
  MatrixXd C(nfi, na + ne);
  for (Eigen::Index c = 0; c < na; ++c) C.col(c) = cols[static_cast<std::size_t>(c)];
  if (ne > 0) C.rightCols(ne) = P.A().transpose();

  double sign_violation = 0.0;
  double complementarity = 0.0;
  VectorXd r = gf;
  if (C.cols() > 0) {
    const VectorXd mult = C.colPivHouseholderQr().solve(-gf);
    r += C * mult;
    for (Eigen::Index c = 0; c < na; ++c) {
      const double weight = C.col(c).lpNorm<Eigen::Infinity>();
      sign_violation = std::max(sign_violation, -mult[c] * weight);
      complementarity =
          std::max(complementarity, std::abs(mult[c]) * slack[static_cast<std::size_t>(c)]);
    }
  }
  double eq_res = 0.0;
  if (ne > 0) {
    eq_res = (P.A() * y - P.d()).lpNorm<Eigen::Infinity>() /
             (1.0 + P.d().lpNorm<Eigen::Infinity>());
  }
  const double stationarity = r.lpNorm<Eigen::Infinity>() / scale;
  return std::max({stationarity, sign_violation / scale, complementarity / scale, eq_res, gap});
}

double violation_scale(const ConvexProgram& prog, std::span<const double> x) {
  double s = 1.0;
  for (const auto& gk : prog.inequalities) {
    const double v = gk(x, {});
    if (std::isfinite(v)) s = std::max(s, std::abs(v));
  }
  return s;
}

}  // namespace

bool strictly_feasible(const ConvexProgram& prog, std::span<const double> x, double eq_tol) {
  if (x.size() != prog.dim) return false;
  for (std::size_t i = 0; i < prog.dim; ++i) {
    if (!std::isfinite(x[i])) return false;
    const double lo = bound_at(prog.lower, i, -kInf);
    const double hi = bound_at(prog.upper, i, kInf);
    if (is_fixed(prog, i)) {
      if (x[i] != lo) return false;
    } else if (!(x[i] > lo && x[i] < hi)) {
      return false;
    }
  }
  for (const auto& gk : prog.inequalities) {
    if (!(gk(x, {}) < 0.0)) return false;
  }
  for (std::size_t r = 0; r < prog.eq_rows.size(); ++r) {
    double ax = 0.0, mag = std::abs(prog.eq_rhs[r]);
    for (std::size_t i = 0; i < prog.dim; ++i) {
      ax += prog.eq_rows[r][i] * x[i];
      mag += std::abs(prog.eq_rows[r][i] * x[i]);
    }
    if (std::abs(ax - prog.eq_rhs[r]) > eq_tol * (1.0 + mag)) return false;
  }
  return true;
}

Phase1Result phase1_start(const ConvexProgram& prog, std::span<const double> guess,
                          const SolverOptions& opts) {
  check_shape(prog);
  if (guess.size() != prog.dim) throw std::invalid_argument("phase1: guess has wrong size");
  const std::size_t n = prog.dim;
  if (!bounds_consistent(prog)) {
    Phase1Result bad;
    bad.x.assign(guess.begin(), guess.end());
    return bad;
  }

  // Restore equalities on the original program first.
  std::vector<double> x0(guess.begin(), guess.end());
  {
    ScaledProblem P(prog, x0);
    VectorXd y = P.to_scaled(x0);
    project_equalities(P, y);
    x0 = P.to_full(y);
  }
  const double g_scale = violation_scale(prog, x0);

  // Augmented program over (x, s).
  ConvexProgram aux;
  aux.dim = n + 1;
  aux.objective = [n](std::span<const double> z, std::span<double> grad) {
    if (!grad.empty()) {
      std::fill(grad.begin(), grad.end(), 0.0);
      grad[n] = 1.0;
    }
    return z[n];
  };
  for (const auto& gk : prog.inequalities) {
    aux.inequalities.push_back([gk, n, g_scale](std::span<const double> z, std::span<double> grad) {
      const auto x = z.first(n);
      if (grad.empty()) return gk(x, {}) / g_scale - z[n];
      const double v = gk(x, grad.first(n));
      for (std::size_t i = 0; i < n; ++i) grad[i] /= g_scale;
      grad[n] = -1.0;
      return v / g_scale - z[n];
    });
  }
  aux.lower.assign(n + 1, -kInf);
  aux.upper.assign(n + 1, kInf);
  aux.scale.assign(n + 1, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double sc = prog.scale.empty() ? 1.0 : prog.scale[i];
    aux.scale[i] = sc;
    if (is_fixed(prog, i)) {
      aux.lower[i] = aux.upper[i] = prog.lower[i];
      continue;
    }
    const double lo = bound_at(prog.lower, i, -kInf);
    const double hi = bound_at(prog.upper, i, kInf);
    if (std::isfinite(lo)) {
      aux.inequalities.push_back([i, lo, sc, n](std::span<const double> z, std::span<double> grad) {
        if (!grad.empty()) {
          std::fill(grad.begin(), grad.end(), 0.0);
          grad[i] = -1.0 / sc;
          grad[n] = -1.0;
        }
        return (lo - z[i]) / sc - z[n];
      });
    }
    if (std::isfinite(hi)) {
      aux.inequalities.push_back([i, hi, sc, n](std::span<const double> z, std::span<double> grad) {
        if (!grad.empty()) {
          std::fill(grad.begin(), grad.end(), 0.0);
          grad[i] = 1.0 / sc;
          grad[n] = -1.0;
        }
        return (z[i] - hi) / sc - z[n];
      });
    }
  }
  // Keeps the auxiliary problem bounded below.
  aux.inequalities.push_back([n](std::span<const double> z, std::span<double> grad) {
    if (!grad.empty()) {
      std::fill(grad.begin(), grad.end(), 0.0);
      grad[n] = -1.0;
    }
    return -1.0 - z[n];
  });
  for (std::size_t r = 0; r < prog.eq_rows.size(); ++r) {
    std::vector<double> row = prog.eq_rows[r];
    row.push_back(0.0);
    aux.add_equality(std::move(row), prog.eq_rhs[r]);
  }

  std::vector<double> z0 = x0;
  double worst = -kInf;
  z0.push_back(0.0);
  for (std::size_t k = 0; k + 1 < aux.inequalities.size(); ++k) {
    const double v = aux.inequalities[k](z0, {});  // s = 0 here
    if (!std::isfinite(v)) {
      Phase1Result bad;
      bad.x = x0;
      return bad;
    }
    worst = std::max(worst, v);
  }
  z0[n] = std::max(worst, 0.0) + 1.0;

  ScaledProblem P(aux, z0);
  const VectorXd y0 = P.to_scaled(z0);
  auto exit_when_feasible = [&](const VectorXd& y) {
    if (y[static_cast<Eigen::Index>(P.nf() - 1)] >= 0.0) return false;
    return strictly_feasible(prog, std::span<const double>(P.to_full(y)).first(n));
  };
  const BarrierRun run = run_barrier(P, y0, opts, exit_when_feasible);

  Phase1Result out;
  const std::vector<double> z = P.to_full(run.y);
  out.x.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
  out.slack = z[n];
  out.iterations = run.iterations;
  out.feasible = strictly_feasible(prog, out.x);
  return out;
}

SolverResult minimize(const ConvexProgram& prog, std::span<const double> x0,
                      const SolverOptions& opts) {
  check_shape(prog);
  if (x0.size() != prog.dim) throw std::invalid_argument("minimize: x0 has wrong size");

  SolverResult result;
  std::vector<double> start(x0.begin(), x0.end());
  for (std::size_t i = 0; i < prog.dim; ++i) {
    if (is_fixed(prog, i)) start[i] = prog.lower[i];
  }
  const bool given_feasible = strictly_feasible(prog, start);
  if (!given_feasible) {
    const Phase1Result p1 = phase1_start(prog, start, opts);
    result.iterations += p1.iterations;
    if (!p1.feasible) {
      result.x = p1.x;
      result.status = SolverStatus::infeasible;
      return result;
    }
    start = p1.x;
  }

  ScaledProblem P(prog, start);
  VectorXd y = P.to_scaled(start);
  project_equalities(P, y);
  if (!std::isfinite(P.barrier(y, opts.mu0))) y = P.to_scaled(start);

  const BarrierRun run = run_barrier(P, y, opts, {});
  result.iterations += run.iterations;
  result.gradient_fallbacks = run.fallbacks;
  result.stage_objectives = run.stage_objectives;
  result.x = P.to_full(run.y);
  result.objective = prog.objective(result.x, {});

  const double gap = static_cast<double>(P.barrier_terms()) * run.mu;
  result.kkt_residual = kkt_residual(P, run.y, run.mu, gap);

  bool slack_ok = true;
  for (const auto& gk : prog.inequalities) {
    if (!(gk(result.x, {}) <= opts.feas_tol)) slack_ok = false;
  }
  if (run.status != SolverStatus::converged) {
    result.status = run.status;
  } else if (result.kkt_residual <= opts.tol && slack_ok) {
    result.status = SolverStatus::converged;
  } else {
    result.status = SolverStatus::max_iter;
  }

  if (given_feasible) {
    const double f_start = prog.objective(start, {});
    if (f_start < result.objective) {
      result.x = start;
      result.objective = f_start;
    }
  }
  return result;
}

}  // namespace fogalloc
