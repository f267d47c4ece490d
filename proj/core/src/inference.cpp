#include "gibbsfit/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gibbsfit {

double default_eta(int n) {
  if (n < 1) throw std::invalid_argument("default_eta: n must be positive");
  return std::max(std::pow(static_cast<double>(n), -0.25), 0.05);
}

namespace {

struct Box {
  Eigen::VectorXd lo, hi;

  Eigen::VectorXd clamp(const Eigen::VectorXd& t) const {
    return t.cwiseMax(lo).cwiseMin(hi);
  }
  bool at_boundary(const Eigen::VectorXd& t) const {
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double slack = 1e-8 * (1.0 + std::abs(hi[i]) + std::abs(lo[i]));
      if (t[i] - lo[i] <= slack || hi[i] - t[i] <= slack) return true;
    }
    return false;
  }
};

Box resolve_box(const MleConfig& cfg, double eta, int d) {
  Box box;
  if (cfg.box_lower.size() > 0 || cfg.box_upper.size() > 0) {
    if (cfg.box_lower.size() != d || cfg.box_upper.size() != d)
      throw std::invalid_argument("mle: parameter box has wrong dimension");
    if (((cfg.box_upper - cfg.box_lower).array() <= 0).any())
      throw std::invalid_argument("mle: parameter box is empty");
    box.lo = cfg.box_lower;
    box.hi = cfg.box_upper;
  } else {
    box.lo = Eigen::VectorXd::Constant(d, -1.0 / eta);
    box.hi = Eigen::VectorXd::Constant(d, 1.0 / eta);
  }
  return box;
}

// Sample-dependent constants of the peeled log-likelihood
// log nu_t([w]) = sum_e counts_e F_t(e) - (n - r) P(t) + log nu_t(tail):
// window histogram, the per-direction count sums, and the empirical moments.
struct PeeledData {
  int n = 0;
  int r = 0;
  Eigen::VectorXd counts;       // (r+1)-window histogram, edge enumeration order
  Eigen::VectorXd grad_counts;  // d entries: counts . f_i
  int tail_state = -1;
  Eigen::VectorXd alpha;        // d+1 empirical moments, base first
};

PeeledData peel_data(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w) {
  validate_family(spec, fam);
  if (w.size() < fam.common_depth())
    throw std::invalid_argument("mle: sample shorter than the family depth");
  if (!spec.admissible(w))
    throw std::invalid_argument("mle: sample word is not admissible");

  PeeledData data;
  data.n = w.size();
  data.r = std::max(fam.common_depth() - 1, 1);
  const WordSpace states(spec, data.r);
  const WordSpace edges(spec, data.r + 1);

  data.counts = Eigen::VectorXd::Zero(edges.size());
  for (int k = 0; k + data.r < data.n; ++k) {
    Word window(std::vector<int>(w.syms.begin() + k, w.syms.begin() + k + data.r + 1));
    data.counts[edges.index_checked(window)] += 1.0;
  }
  data.tail_state = states.index_checked(w.suffix(data.r));

  data.grad_counts.resize(fam.dim());
  for (int i = 0; i < fam.dim(); ++i) {
    const std::vector<double> fi = lift(spec, fam.dirs[static_cast<std::size_t>(i)], data.r + 1).values;
    double s = 0.0;
    for (int e = 0; e < edges.size(); ++e) s += data.counts[e] * fi[static_cast<std::size_t>(e)];
    data.grad_counts[i] = s;
  }
  data.alpha = empirical_moments(spec, fam, w);
  return data;
}

struct Eval {
  GibbsSystem sys;
  double loglik;
  Eigen::VectorXd moments;  // d+1
  double moment_gap;        // sup-norm mismatch against alpha over included components
};

// Orthonormal basis of the near-null space of the direction covariance:
// combinations cohomologous to a constant, along which every mu_t is the
// same. Being a property of the directions alone it does not depend on
// theta, so it is computed once, at zero. Both estimators keep their
// iterates in the orthogonal complement (the parameter is identifiable
// only modulo this subspace; the likelihood's boundary terms would
// otherwise push the null component to the box edge).
Eigen::MatrixXd cohomology_null_basis(const SubshiftSpec& spec, const PotentialFamily& fam,
                                      const SolveOptions& solve) {
  const int d = fam.dim();
  GibbsSystem sys(spec, fam, Eigen::VectorXd::Zero(d), solve);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(asymptotic_covariance(sys));
  int l = 0;
  while (l < d && es.eigenvalues()[l] <= 1e-8) ++l;
  return es.eigenvectors().leftCols(l);
}

Eigen::VectorXd drop_null(const Eigen::MatrixXd& nullb, const Eigen::VectorXd& v) {
  if (nullb.cols() == 0) return v;
  return v - nullb * (nullb.transpose() * v);
}

Eval evaluate_point(const SubshiftSpec& spec, const PotentialFamily& fam,
                    const Eigen::VectorXd& theta, const PeeledData& data,
                    const MleConfig& cfg) {
  GibbsSystem sys(spec, fam, theta, cfg.solve);
  double ll = 0.0;
  for (int e = 0; e < sys.edges().size(); ++e)
    ll += data.counts[e] * sys.edge_potential()[static_cast<std::size_t>(e)];
  ll -= static_cast<double>(data.n - data.r) * sys.pressure();
  ll += std::log(sys.nu()[data.tail_state]);

  Eigen::VectorXd moments = moment_vector(sys);
  double gap = 0.0;
  for (Eigen::Index c = cfg.moment_includes_base ? 0 : 1; c < moments.size(); ++c)
    gap = std::max(gap, std::abs(data.alpha[c] - moments[c]));
  return {std::move(sys), ll, std::move(moments), gap};
}

double tail_log_nu(const SubshiftSpec& spec, const PotentialFamily& fam,
                   const Eigen::VectorXd& theta, const PeeledData& data,
                   const SolveOptions& solve) {
  GibbsSystem sys(spec, fam, theta, solve);
  return std::log(sys.nu()[data.tail_state]);
}

Eigen::VectorXd mle_gradient(const SubshiftSpec& spec, const PotentialFamily& fam,
                             const Eigen::VectorXd& theta, const PeeledData& data,
                             const Eval& ev, const MleConfig& cfg) {
  const int d = fam.dim();
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) {
    const double h = 1e-5 * (1.0 + std::abs(theta[i]));
    Eigen::VectorXd up = theta, dn = theta;
    up[i] += h;
    dn[i] -= h;
    const double tail_term = (tail_log_nu(spec, fam, up, data, cfg.solve) -
                              tail_log_nu(spec, fam, dn, data, cfg.solve)) /
                             (2.0 * h);
    g[i] = data.grad_counts[i] -
           static_cast<double>(data.n - data.r) * ev.moments[i + 1] + tail_term;
  }
  return g;
}

struct AscentOutcome {
  Eigen::VectorXd theta;
  Eval ev;
  bool converged;
  bool blocked_by_constraint;
};

AscentOutcome newton_ascent(const SubshiftSpec& spec, const PotentialFamily& fam,
                            Eigen::VectorXd theta, Eval ev, const PeeledData& data,
                            const MleConfig& cfg, const Box& box, double eta2,
                            const Eigen::MatrixXd& nullb) {
  bool blocked = false;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd grad =
        drop_null(nullb, mle_gradient(spec, fam, theta, data, ev, cfg));
    if (grad.cwiseAbs().maxCoeff() <= cfg.opt_tol)
      return {std::move(theta), std::move(ev), true, blocked};

    Eigen::MatrixXd hess = static_cast<double>(data.n - data.r) * asymptotic_covariance(ev.sys);
    hess.diagonal().array() += 1e-10 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
    Eigen::VectorXd step = drop_null(nullb, hess.ldlt().solve(grad));
    if (!step.allFinite()) step = grad;  // singular curvature: plain ascent direction

    bool moved = false;
    blocked = false;
    double tau = 1.0;
    for (int half = 0; half < 60; ++half, tau *= 0.5) {
      Eigen::VectorXd cand = box.clamp(theta + tau * step);
      if ((cand - theta).cwiseAbs().maxCoeff() == 0.0) break;  // pinned at the box
      Eval cev = evaluate_point(spec, fam, cand, data, cfg);
      if (cev.moment_gap > eta2) {
        blocked = true;  // candidate left the moment band; shrink the step
        continue;
      }
      if (cev.loglik > ev.loglik) {
        theta = std::move(cand);
        ev = std::move(cev);
        moved = true;
        blocked = false;
        break;
      }
    }
    if (!moved) {
      // Near the optimum the quadratic gain drops below the roundoff of the
      // log-likelihood and value comparisons stop improving while the
      // gradient is still above tolerance. Trust the Newton model instead:
      // take the full step if it contracts the gradient.
      Eigen::VectorXd polish = box.clamp(theta + step);
      if ((polish - theta).cwiseAbs().maxCoeff() > 0.0) {
        Eval pev = evaluate_point(spec, fam, polish, data, cfg);
        if (pev.moment_gap <= eta2) {
          const Eigen::VectorXd pgrad =
              drop_null(nullb, mle_gradient(spec, fam, polish, data, pev, cfg));
          if (pgrad.cwiseAbs().maxCoeff() < grad.cwiseAbs().maxCoeff()) {
            theta = std::move(polish);
            ev = std::move(pev);
            continue;
          }
        }
      }
      // No feasible improving point along the direction: either we sit at a
      // binding constraint (treated as converged, flagged by the caller) or
      // the surface is flat to roundoff.
      const bool grad_small = grad.cwiseAbs().maxCoeff() <= cfg.opt_tol;
      const bool settled = grad_small || blocked || box.at_boundary(theta);
      return {std::move(theta), std::move(ev), settled, blocked};
    }
  }
  return {std::move(theta), std::move(ev), false, blocked};
}

std::vector<Eigen::VectorXd> lattice_starts(const Box& box, int d, int requested) {
  const int m = std::min(d, 4);
  int levels = 3;
  if (requested > 0) {
    levels = 1;
    while (std::pow(levels + 2, m) <= static_cast<double>(requested)) levels += 2;
  }
  const Eigen::VectorXd mid = 0.5 * (box.lo + box.hi);
  const Eigen::VectorXd quarter = 0.25 * (box.hi - box.lo);
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  while (true) {
    Eigen::VectorXd t = mid;
    for (int i = 0; i < m; ++i) {
      const double frac = levels == 1 ? 0.0
                                      : (2.0 * idx[static_cast<std::size_t>(i)] /
                                             static_cast<double>(levels - 1) -
                                         1.0);
      t[i] = mid[i] + frac * quarter[i];
    }
    out.push_back(std::move(t));
    int i = 0;
    for (; i < m; ++i) {
      if (++idx[static_cast<std::size_t>(i)] < levels) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
    if (i == m) break;
  }
  return out;
}

}  // namespace

EstimationResult mle(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w,
                     const MleConfig& cfg) {
  const PeeledData data = peel_data(spec, fam, w);
  const int d = fam.dim();
  const double eta = cfg.eta > 0 ? cfg.eta : default_eta(data.n);
  const double eta2 = eta * eta;
  const Box box = resolve_box(cfg, eta, d);

  const Eigen::MatrixXd nullb = cohomology_null_basis(spec, fam, cfg.solve);

  std::vector<Eigen::VectorXd> starts = lattice_starts(box, d, cfg.grid_starts);
  {
    MleConfig warm_cfg = cfg;
    warm_cfg.eta = eta;
    const MpeResult warm = mpe(spec, fam, w, warm_cfg);
    starts.push_back(warm.theta_tilde);
  }
  for (Eigen::VectorXd& s : starts) s = drop_null(nullb, s);

  bool any_feasible = false;
  double best_violation = std::numeric_limits<double>::infinity();
  Eigen::VectorXd closest;
  std::vector<AscentOutcome> finished;

  for (const Eigen::VectorXd& raw : starts) {
    const Eigen::VectorXd start = box.clamp(raw);
    bool duplicate = false;
    for (const Eigen::VectorXd& prev : starts)
      if (&prev != &raw && (prev - start).cwiseAbs().maxCoeff() == 0.0 && &prev < &raw)
        duplicate = true;
    if (duplicate) continue;

    Eval ev = evaluate_point(spec, fam, start, data, cfg);
    if (ev.moment_gap > eta2) {
      if (ev.moment_gap - eta2 < best_violation) {
        best_violation = ev.moment_gap - eta2;
        closest = start;
      }
      continue;
    }
    any_feasible = true;
    finished.push_back(newton_ascent(spec, fam, start, std::move(ev), data, cfg, box, eta2, nullb));
  }

  if (!any_feasible) {
    std::ostringstream os;
    os << "mle: no feasible parameter (moment band eta^2 = " << eta2
       << " excludes every starting point; closest candidate theta = [";
    for (Eigen::Index i = 0; i < closest.size(); ++i) {
      if (i) os << ", ";
      os << closest[i];
    }
    os << "] misses by " << best_violation << ")";
    throw std::runtime_error(os.str());
  }

  const AscentOutcome* best = nullptr;
  for (const AscentOutcome& out : finished) {
    if (!best || out.ev.loglik > best->ev.loglik + 1e-10 ||
        (std::abs(out.ev.loglik - best->ev.loglik) <= 1e-10 &&
         out.theta.norm() < best->theta.norm()))
      best = &out;
  }

  EstimationResult res;
  res.theta_hat = best->theta;
  res.loglik = best->ev.loglik;
  res.converged = best->converged;
  res.n_used = data.n;
  const bool moment_tight = eta2 - best->ev.moment_gap <= 1e-8 * eta2;
  res.constraint_active =
      box.at_boundary(best->theta) || moment_tight || best->blocked_by_constraint;
  return res;
}

MpeResult mpe(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w,
              const MleConfig& cfg) {
  validate_family(spec, fam);
  if (w.size() < fam.common_depth())
    throw std::invalid_argument("mpe: sample shorter than the family depth");
  const int d = fam.dim();
  const int n = w.size();
  const double eta = cfg.eta > 0 ? cfg.eta : default_eta(n);
  const Box box = resolve_box(cfg, eta, d);
  const Eigen::VectorXd alpha = empirical_moments(spec, fam, w);

  const Eigen::MatrixXd nullb = cohomology_null_basis(spec, fam, cfg.solve);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  theta = box.clamp(theta);

  MpeResult res;
  res.rank_deficient = nullb.cols() > 0;
  auto objective = [&](const GibbsSystem& sys) {
    return alpha[0] + alpha.tail(d).dot(sys.theta()) - sys.pressure();
  };

  GibbsSystem sys(spec, fam, theta, cfg.solve);
  double obj = objective(sys);
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd grad = drop_null(nullb, alpha.tail(d) - pressure_gradient(sys));
    if (grad.cwiseAbs().maxCoeff() <= cfg.opt_tol) {
      res.newton_iters = it;
      res.theta_tilde = theta;
      res.objective = obj;
      return res;
    }
    const Eigen::MatrixXd sigma = asymptotic_covariance(sys);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const double eig_floor = 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
    Eigen::VectorXd step = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) {
      if (es.eigenvalues()[i] <= eig_floor) {
        res.rank_deficient = true;  // direction lives in the near-null space
        continue;
      }
      const Eigen::VectorXd v = es.eigenvectors().col(i);
      step += v * (v.dot(grad) / es.eigenvalues()[i]);
    }
    step = drop_null(nullb, step);
    if (step.cwiseAbs().maxCoeff() == 0.0) step = grad;

    bool moved = false;
    double tau = 1.0;
    for (int half = 0; half < 60; ++half, tau *= 0.5) {
      Eigen::VectorXd cand = box.clamp(theta + tau * step);
      if ((cand - theta).cwiseAbs().maxCoeff() == 0.0) break;
      GibbsSystem csys(spec, fam, cand, cfg.solve);
      const double cobj = objective(csys);
      if (cobj > obj) {
        if ((cand.array() == box.lo.array()).any() || (cand.array() == box.hi.array()).any())
          res.hit_box = true;
        theta = std::move(cand);
        sys = std::move(csys);
        obj = cobj;
        moved = true;
        break;
      }
    }
    res.newton_iters = it + 1;
    if (!moved) break;
  }
  res.theta_tilde = theta;
  res.objective = obj;
  return res;
}

Eigen::MatrixXd moment_covariance(const SubshiftSpec& spec, const PotentialFamily& fam,
                                  const Word& w, const Word& anchor) {
  validate_family(spec, fam);
  const int m = fam.common_depth();
  const int n = w.size();
  if (n < m) throw std::invalid_argument("moment_covariance: sample shorter than family depth");
  if (anchor.empty() || !spec.admissible(anchor))
    throw std::invalid_argument("moment_covariance: anchor must be a nonempty admissible word");
  if (anchor.size() < m - 1)
    throw std::invalid_argument("moment_covariance: anchor shorter than depth - 1");
  if (!spec.allowed(w.back(), anchor[0]))
    throw std::invalid_argument("moment_covariance: anchor cannot follow the sample's last symbol");

  const Word ext = w.concat(anchor);
  const WordSpace ws(spec, m);
  const int d = fam.dim();

  Eigen::MatrixXd y(d, n);
  std::vector<std::vector<double>> tables;
  tables.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    tables.push_back(lift(spec, fam.dirs[static_cast<std::size_t>(i)], m).values);
  for (int k = 0; k < n; ++k) {
    Word window(std::vector<int>(ext.syms.begin() + k, ext.syms.begin() + k + m));
    const int idx = ws.index_checked(window);
    for (int i = 0; i < d; ++i) y(i, k) = tables[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)];
  }
  const Eigen::VectorXd mean = y.rowwise().mean();
  y.colwise() -= mean;

  const int block = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))));
  const int nblocks = n / block;
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(d, nblocks);
  for (int b = 0; b < nblocks; ++b)
    sums.col(b) = y.middleCols(b * block, block).rowwise().sum() /
                  std::sqrt(static_cast<double>(block));
  return sums * sums.transpose() / static_cast<double>(nblocks);
}

double pressure_root(const SubshiftSpec& spec, const PotentialFamily& fam, double lo,
                     double hi, double tol, const SolveOptions& opts) {
  if (fam.dim() != 1)
    throw std::invalid_argument("pressure_root: family must have exactly one direction");
  if (!(lo < hi)) throw std::invalid_argument("pressure_root: empty interval");
  if (!(tol > 0)) throw std::invalid_argument("pressure_root: tolerance must be positive");

  auto p_at = [&](double t) {
    return pressure(spec, fam, Eigen::VectorXd::Constant(1, t), opts);
  };
  auto grad_at = [&](double t) {
    return pressure_gradient(spec, fam, Eigen::VectorXd::Constant(1, t), opts)[0];
  };

  double a = lo, b = hi;
  double fa = p_at(a), fb = p_at(b);
  if (std::abs(fa) <= tol) return a;
  if (std::abs(fb) <= tol) return b;
  if (fa * fb > 0)
    throw std::runtime_error("pressure_root: pressure has no sign change over the interval");
  if (grad_at(a) * grad_at(b) <= 0)
    throw std::runtime_error("pressure_root: pressure gradient changes sign (not monotone)");

  for (int it = 0; it < 200; ++it) {
    double s = (fb != fa) ? b - fb * (b - a) / (fb - fa) : 0.5 * (a + b);
    if (!(s > a && s < b)) s = 0.5 * (a + b);
    const double fs = p_at(s);
    if (std::abs(fs) <= tol) return s;
    if (fa * fs < 0) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
  }
  throw std::runtime_error("pressure_root: did not reach tolerance within 200 iterations");
}

}  // namespace gibbsfit
