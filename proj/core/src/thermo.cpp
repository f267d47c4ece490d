#include "gibbsfit/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace gibbsfit {

namespace {

int compute_order(const SubshiftSpec& spec, const PotentialFamily& fam) {
  validate_family(spec, fam);
  return std::max(fam.common_depth() - 1, 1);
}

struct PerronResult {
  Eigen::VectorXd vec;  // positive, normalized to unit sum
  double lambda;
};

// Plain power iteration with Collatz-Wielandt bracketing. The matrices here
// are small and primitive, so this is both simpler and easier to certify
// than a general eigensolver: lo <= lambda <= hi holds at every step, and we
// stop once the bracket and the residual are inside tol relatively.
PerronResult perron_vector(const Eigen::MatrixXd& m, double tol, int max_iter,
                           const char* what) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = m * v;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ratio = w[i] / v[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    const double lam = 0.5 * (lo + hi);
    w /= w.sum();
    if (hi - lo <= tol * hi) {
      const double res = (m * w - lam * w).cwiseAbs().maxCoeff();
      if (res <= tol * lam * w.maxCoeff()) return {std::move(w), lam};
    }
    v = std::move(w);
  }
  throw std::runtime_error(std::string(what) +
                           ": power iteration did not converge within iteration cap");
}

}  // namespace

GibbsSystem::GibbsSystem(const SubshiftSpec& spec, const PotentialFamily& fam,
                         const Eigen::VectorXd& theta, const SolveOptions& opts)
    : spec_(spec),
      fam_(fam),
      theta_(theta),
      order_(compute_order(spec, fam)),
      states_(spec, order_),
      edges_(spec, order_ + 1) {
  if (opts.tol <= 0 || opts.max_iter < 1)
    throw std::invalid_argument("solve_gibbs: tolerance and iteration cap must be positive");

  const LocallyConstantFn F = assemble_potential(spec_, fam_, theta_);
  F_edge_ = lift(spec_, F, order_ + 1).values;
  base_edge_ = lift(spec_, fam_.base, order_ + 1).values;
  dir_edge_.resize(static_cast<std::size_t>(fam_.dim()));
  for (int i = 0; i < fam_.dim(); ++i)
    dir_edge_[static_cast<std::size_t>(i)] =
        lift(spec_, fam_.dirs[static_cast<std::size_t>(i)], order_ + 1).values;

  const int ns = states_.size();
  const int ne = edges_.size();
  edge_src_.resize(static_cast<std::size_t>(ne));
  edge_dst_.resize(static_cast<std::size_t>(ne));

  // Exponentiate relative to the largest potential value so that extreme
  // parameters cannot overflow; the shift is added back to the pressure.
  const double shift = *std::max_element(F_edge_.begin(), F_edge_.end());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ns, ns);
  for (int e = 0; e < ne; ++e) {
    const Word& ew = edges_.word(e);
    const int u = states_.index_checked(ew.prefix(order_));
    const int v = states_.index_checked(ew.suffix(order_));
    edge_src_[static_cast<std::size_t>(e)] = u;
    edge_dst_[static_cast<std::size_t>(e)] = v;
    a(u, v) = std::exp(F_edge_[static_cast<std::size_t>(e)] - shift);
  }

  PerronResult right = perron_vector(a, 0.5 * opts.tol, opts.max_iter, "solve_gibbs(nu)");
  PerronResult left =
      perron_vector(a.transpose(), 0.5 * opts.tol, opts.max_iter, "solve_gibbs(phi)");
  nu_ = std::move(right.vec);
  phi_ = std::move(left.vec);

  const double lam_scaled = phi_.dot(a * nu_) / phi_.dot(nu_);
  const double res_nu = (a * nu_ - lam_scaled * nu_).cwiseAbs().maxCoeff();
  if (!(res_nu <= opts.tol * lam_scaled * nu_.maxCoeff()))
    throw std::runtime_error("solve_gibbs: residual certificate failed for nu");
  const double res_phi = (a.transpose() * phi_ - lam_scaled * phi_).cwiseAbs().maxCoeff();
  if (!(res_phi <= opts.tol * lam_scaled * phi_.maxCoeff()))
    throw std::runtime_error("solve_gibbs: residual certificate failed for phi");

  pressure_ = std::log(lam_scaled) + shift;
  lambda_ = std::exp(pressure_);

  phi_ /= phi_.dot(nu_);
  mu_ = phi_.cwiseProduct(nu_);
  mu_ /= mu_.sum();

  transition_ = Eigen::MatrixXd::Zero(ns, ns);
  for (int e = 0; e < ne; ++e) {
    const int u = edge_src_[static_cast<std::size_t>(e)];
    const int v = edge_dst_[static_cast<std::size_t>(e)];
    transition_(u, v) = std::exp(F_edge_[static_cast<std::size_t>(e)] - shift) / lam_scaled *
                        nu_[v] / nu_[u];
  }
  // Row sums are 1 + O(tol); renormalizing exactly keeps long sample paths
  // from accumulating drift.
  for (int u = 0; u < ns; ++u) {
    const double rs = transition_.row(u).sum();
    transition_.row(u) /= rs;
  }

  mu_edge_.resize(ne);
  for (int e = 0; e < ne; ++e)
    mu_edge_[e] = mu_[edge_src_[static_cast<std::size_t>(e)]] *
                  transition_(edge_src_[static_cast<std::size_t>(e)],
                              edge_dst_[static_cast<std::size_t>(e)]);
  mu_edge_ /= mu_edge_.sum();
}

Eigen::MatrixXd GibbsSystem::transfer() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(states_.size(), states_.size());
  for (int e = 0; e < edges_.size(); ++e)
    a(edge_src_[static_cast<std::size_t>(e)], edge_dst_[static_cast<std::size_t>(e)]) =
        std::exp(F_edge_[static_cast<std::size_t>(e)]);
  return a;
}

double pressure(const SubshiftSpec& spec, const PotentialFamily& fam,
                const Eigen::VectorXd& theta, const SolveOptions& opts) {
  return GibbsSystem(spec, fam, theta, opts).pressure();
}

Eigen::VectorXd pressure_gradient(const GibbsSystem& sys) {
  const int d = sys.dim();
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) {
    const auto& fi = sys.edge_dirs()[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (int e = 0; e < sys.edges().size(); ++e)
      s += sys.mu_edge()[e] * fi[static_cast<std::size_t>(e)];
    g[i] = s;
  }
  return g;
}

Eigen::VectorXd pressure_gradient(const SubshiftSpec& spec, const PotentialFamily& fam,
                                  const Eigen::VectorXd& theta, const SolveOptions& opts) {
  return pressure_gradient(GibbsSystem(spec, fam, theta, opts));
}

Eigen::VectorXd moment_vector(const GibbsSystem& sys) {
  Eigen::VectorXd out(sys.dim() + 1);
  double s = 0.0;
  for (int e = 0; e < sys.edges().size(); ++e)
    s += sys.mu_edge()[e] * sys.edge_base()[static_cast<std::size_t>(e)];
  out[0] = s;
  out.tail(sys.dim()) = pressure_gradient(sys);
  return out;
}

namespace {

// Transition matrix of the chain watched through (r+1)-windows; edge e' may
// follow e when the state windows overlap, and the step probability is the
// state-chain entry.
Eigen::MatrixXd edge_chain(const GibbsSystem& sys) {
  const int ne = sys.edges().size();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(ne, ne);
  for (int e = 0; e < ne; ++e)
    for (int e2 = 0; e2 < ne; ++e2)
      if (sys.edge_src(e2) == sys.edge_dst(e))
        p(e, e2) = sys.transition()(sys.edge_dst(e), sys.edge_dst(e2));
  return p;
}

std::vector<Eigen::VectorXd> centered_dirs(const GibbsSystem& sys) {
  const int ne = sys.edges().size();
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(sys.dim()));
  for (int i = 0; i < sys.dim(); ++i) {
    Eigen::VectorXd f(ne);
    for (int e = 0; e < ne; ++e)
      f[e] = sys.edge_dirs()[static_cast<std::size_t>(i)][static_cast<std::size_t>(e)];
    f.array() -= sys.mu_edge().dot(f);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

Eigen::MatrixXd asymptotic_covariance(const GibbsSystem& sys) {
  const int d = sys.dim();
  const int ne = sys.edges().size();
  const Eigen::MatrixXd p = edge_chain(sys);
  const std::vector<Eigen::VectorXd> f = centered_dirs(sys);

  // (I - P + 1 mu^T) h = P f~  picks the mean-zero solution of the Poisson
  // equation, i.e. h = sum_{tau>=1} P^tau f~.
  Eigen::MatrixXd fundamental = Eigen::MatrixXd::Identity(ne, ne) - p +
                                Eigen::VectorXd::Ones(ne) * sys.mu_edge().transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(fundamental);

  std::vector<Eigen::VectorXd> h;
  h.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXd rhs = p * f[static_cast<std::size_t>(i)];
    Eigen::VectorXd sol = lu.solve(rhs);
    if ((fundamental * sol - rhs).cwiseAbs().maxCoeff() >
        1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()))
      throw std::runtime_error(
          "asymptotic_covariance: Poisson solve lost accuracy (internal error)");
    h.push_back(std::move(sol));
  }

  Eigen::MatrixXd sigma(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int e = 0; e < ne; ++e)
        s += sys.mu_edge()[e] *
             (f[static_cast<std::size_t>(i)][e] * f[static_cast<std::size_t>(j)][e] +
              f[static_cast<std::size_t>(i)][e] * h[static_cast<std::size_t>(j)][e] +
              f[static_cast<std::size_t>(j)][e] * h[static_cast<std::size_t>(i)][e]);
      sigma(i, j) = s;
    }
  return 0.5 * (sigma + sigma.transpose());
}

Eigen::MatrixXd green_kubo_covariance(const GibbsSystem& sys, double term_tol, int max_lag) {
  const int d = sys.dim();
  const Eigen::MatrixXd p = edge_chain(sys);
  const std::vector<Eigen::VectorXd> f = centered_dirs(sys);

  Eigen::MatrixXd sigma(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      sigma(i, j) = sys.mu_edge().cwiseProduct(f[static_cast<std::size_t>(i)])
                        .dot(f[static_cast<std::size_t>(j)]);

  std::vector<Eigen::VectorXd> g = f;  // g_j = P^tau f~_j
  for (int lag = 1; lag <= max_lag; ++lag) {
    for (int j = 0; j < d; ++j) g[static_cast<std::size_t>(j)] = p * g[static_cast<std::size_t>(j)];
    double biggest = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double c = sys.mu_edge().cwiseProduct(f[static_cast<std::size_t>(i)])
                             .dot(g[static_cast<std::size_t>(j)]);
        sigma(i, j) += c;
        sigma(j, i) += c;
        biggest = std::max(biggest, std::abs(c));
      }
    if (biggest < term_tol) return 0.5 * (sigma + sigma.transpose());
  }
  throw std::runtime_error("green_kubo_covariance: series did not reach the term tolerance");
}

double cylinder_log_prob(const GibbsSystem& sys, const Word& w) {
  const int r = sys.order();
  if (w.size() < r)
    throw std::invalid_argument("cylinder_log_prob: word shorter than the operator order");
  if (!sys.spec().admissible(w))
    throw std::invalid_argument("cylinder_log_prob: word '" + w.str() + "' is not admissible");
  const int n = w.size();
  double s = 0.0;
  for (int k = 0; k + r < n; ++k) {
    Word window(std::vector<int>(w.syms.begin() + k, w.syms.begin() + k + r + 1));
    s += sys.edge_potential()[static_cast<std::size_t>(sys.edges().index_checked(window))];
  }
  s -= static_cast<double>(n - r) * sys.pressure();
  s += std::log(sys.nu()[sys.states().index_checked(w.suffix(r))]);
  return s;
}

double invariant_cylinder_prob(const GibbsSystem& sys, const Word& w) {
  const int r = sys.order();
  if (w.size() < r)
    throw std::invalid_argument("invariant_cylinder_prob: word shorter than the operator order");
  if (!sys.spec().admissible(w))
    throw std::invalid_argument("invariant_cylinder_prob: word '" + w.str() +
                                "' is not admissible");
  int cur = sys.states().index_checked(w.prefix(r));
  double p = sys.mu()[cur];
  for (int k = 1; k + r <= w.size(); ++k) {
    Word next(std::vector<int>(w.syms.begin() + k, w.syms.begin() + k + r));
    const int nxt = sys.states().index_checked(next);
    p *= sys.transition()(cur, nxt);
    cur = nxt;
  }
  return p;
}

double oracle_cylinder_prob(const SubshiftSpec& spec, const PotentialFamily& fam,
                            const Eigen::VectorXd& theta, const Word& w, int iters) {
  const LocallyConstantFn F = assemble_potential(spec, fam, theta);
  if (w.empty()) throw std::invalid_argument("oracle_cylinder_prob: empty word");
  if (!spec.admissible(w))
    throw std::invalid_argument("oracle_cylinder_prob: word '" + w.str() + "' is not admissible");
  if (iters < 1) throw std::invalid_argument("oracle_cylinder_prob: iters must be positive");

  const int depth = F.depth;
  const int r = std::max(depth - 1, 1);
  const int len0 = std::max(w.size(), r);

  std::map<int, WordSpace> spaces;
  auto space = [&](int len) -> const WordSpace& {
    auto it = spaces.find(len);
    if (it == spaces.end()) it = spaces.emplace(len, WordSpace(spec, len)).first;
    return it->second;
  };
  const WordSpace& fspace = space(depth);

  const WordSpace& start = space(len0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(start.size());
  Eigen::VectorXd h = Eigen::VectorXd::Ones(start.size());
  for (int i = 0; i < start.size(); ++i)
    if (start.word(i).prefix(w.size()) == w) g[i] = 1.0;

  int len = len0;
  for (int step = 0; step < iters; ++step) {
    const int next_len = std::max(len - 1, r);
    const WordSpace& cur = space(next_len);
    const WordSpace& prev = space(len);
    Eigen::VectorXd g2 = Eigen::VectorXd::Zero(cur.size());
    Eigen::VectorXd h2 = Eigen::VectorXd::Zero(cur.size());
    for (int x = 0; x < cur.size(); ++x) {
      const Word& xw = cur.word(x);
      for (int j = 1; j <= spec.alphabet_size(); ++j) {
        if (!spec.allowed(j, xw[0])) continue;
        const Word jx = Word({j}).concat(xw);
        const double weight =
            std::exp(F.values[static_cast<std::size_t>(fspace.index_checked(jx.prefix(depth)))]);
        const int arg = prev.index_checked(jx.prefix(len));
        g2[x] += weight * g[arg];
        h2[x] += weight * h[arg];
      }
    }
    // Rescaling both iterates identically keeps the ratio intact while
    // preventing overflow at high iteration counts.
    const double c = h2.maxCoeff();
    g = g2 / c;
    h = h2 / c;
    len = next_len;
  }
  return g.sum() / h.sum();
}

SecondDerivativeReport second_derivative_check(const SubshiftSpec& spec,
                                               const PotentialFamily& fam,
                                               const Eigen::VectorXd& theta, double h_grad,
                                               double h_hess, const SolveOptions& opts) {
  if (h_grad <= 0 || h_hess <= 0)
    throw std::invalid_argument("second_derivative_check: step sizes must be positive");
  GibbsSystem sys(spec, fam, theta, opts);
  const int d = sys.dim();

  auto p_at = [&](const Eigen::VectorXd& t) { return pressure(spec, fam, t, opts); };

  SecondDerivativeReport rep;
  rep.analytic_gradient = pressure_gradient(sys);
  rep.covariance = asymptotic_covariance(sys);

  rep.fd_gradient.resize(d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd up = theta, dn = theta;
    up[i] += h_grad;
    dn[i] -= h_grad;
    rep.fd_gradient[i] = (p_at(up) - p_at(dn)) / (2.0 * h_grad);
  }

  const double p0 = sys.pressure();
  rep.fd_hessian.resize(d, d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd up = theta, dn = theta;
    up[i] += h_hess;
    dn[i] -= h_hess;
    rep.fd_hessian(i, i) = (p_at(up) - 2.0 * p0 + p_at(dn)) / (h_hess * h_hess);
    for (int j = i + 1; j < d; ++j) {
      Eigen::VectorXd pp = theta, pm = theta, mp = theta, mm = theta;
      pp[i] += h_hess; pp[j] += h_hess;
      pm[i] += h_hess; pm[j] -= h_hess;
      mp[i] -= h_hess; mp[j] += h_hess;
      mm[i] -= h_hess; mm[j] -= h_hess;
      const double v = (p_at(pp) - p_at(pm) - p_at(mp) + p_at(mm)) / (4.0 * h_hess * h_hess);
      rep.fd_hessian(i, j) = v;
      rep.fd_hessian(j, i) = v;
    }
  }

  rep.max_gradient_diff = (rep.fd_gradient - rep.analytic_gradient).cwiseAbs().maxCoeff();
  rep.max_hessian_diff = (rep.fd_hessian - rep.covariance).cwiseAbs().maxCoeff();
  return rep;
}

CohomologyReport cohomology_independence_check(const SubshiftSpec& spec,
                                               const PotentialFamily& fam,
                                               const Eigen::VectorXd& theta, double tol,
                                               const SolveOptions& opts) {
  GibbsSystem sys(spec, fam, theta, opts);
  const Eigen::MatrixXd sigma = asymptotic_covariance(sys);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  CohomologyReport rep;
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  rep.independent = rep.min_eigenvalue > tol;
  return rep;
}

}  // namespace gibbsfit
