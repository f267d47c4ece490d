#pragma once

#include <Eigen/Dense>

#include "gibbsfit/sampling.hpp"
#include "gibbsfit/thermo.hpp"

namespace gibbsfit {

/// Control-parameter schedule eta_n = max(n^{-1/4}, 0.05).
double default_eta(int n);

struct MleConfig {
  double eta = 0.0;             // <= 0 selects default_eta(n)
  Eigen::VectorXd box_lower;    // optional override of [-1/eta, 1/eta]^d
  Eigen::VectorXd box_upper;
  int grid_starts = 0;          // <= 0 selects 3^min(d,4) lattice points
  double opt_tol = 1e-9;
  int max_iter = 200;
  bool moment_includes_base = true;  // whether the f0 component joins the moment constraint
  SolveOptions solve;
};

struct EstimationResult {
  Eigen::VectorXd theta_hat;
  double loglik = 0.0;  // log nu_theta([w]) at theta_hat
  /// True when the gradient met opt_tol, or when a binding constraint blocks
  /// every feasible ascent direction (the box-clipped boundary case).
  bool converged = false;
  bool constraint_active = false;
  int n_used = 0;
};

struct MpeResult {
  Eigen::VectorXd theta_tilde;
  double objective = 0.0;  // <alpha, (1, t)> - P(F_t)
  int newton_iters = 0;
  bool rank_deficient = false;  // Newton step projected off a near-null space
  bool hit_box = false;         // iterate clipped at the parameter box
};

/// Maximizer of log nu_t([w]) over the box intersected with the eta^2 moment
/// band around the empirical moments. Multi-start Newton ascent with the
/// analytic gradient of the peeled likelihood; the base-cylinder term's
/// derivative is taken by central differences. Throws when no starting point
/// is feasible, with the closest candidate in the message.
EstimationResult mle(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w,
                     const MleConfig& cfg = {});

/// Maximizer of <alpha_n, (1, t)> - P(F_t) by damped Newton with the exact
/// gradient alpha - grad P and Hessian -Sigma(t).
MpeResult mpe(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w,
              const MleConfig& cfg = {});

/// Batch-means Gram estimator of the asymptotic covariance from one sample:
/// window values f_i(X_k, ..., completed by the anchor word past the end)
/// are centered, summed over non-overlapping blocks of length floor(sqrt n),
/// and the block sums' outer products are averaged. Symmetric PSD by
/// construction.
Eigen::MatrixXd moment_covariance(const SubshiftSpec& spec, const PotentialFamily& fam,
                                  const Word& w, const Word& anchor);

/// Solves P(F_theta) = 0 for a one-direction family by a bisection/secant
/// hybrid on [lo, hi]; requires a sign change and a monotone pressure.
double pressure_root(const SubshiftSpec& spec, const PotentialFamily& fam, double lo,
                     double hi, double tol = 1e-10, const SolveOptions& opts = {});

}  // namespace gibbsfit
