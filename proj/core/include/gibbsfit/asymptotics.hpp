#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gibbsfit/inference.hpp"
#include "gibbsfit/potential.hpp"
#include "gibbsfit/subshift.hpp"
#include "gibbsfit/thermo.hpp"

namespace gibbsfit {

/// `count` independent N(0, sigma) vectors. Draw k is a function of
/// (seed, k) alone, so prefixes agree across different counts. Sigma is
/// factored by symmetric eigendecomposition; eigenvalues in [-1e-12, 0) are
/// treated as roundoff and clamped to zero, anything lower is rejected.
std::vector<Eigen::VectorXd> gaussian_draw(const Eigen::MatrixXd& sigma, std::uint64_t seed,
                                           int count);

/// Monte Carlo sample of the estimator's limit law under a covariance sigma.
struct LimitSample {
  std::vector<Eigen::VectorXd> draws;  // realizations of G(N)^{-1} N^t
  std::vector<double> xi_draws;        // the quadratic form N G(N)^{-1} N^t
  std::uint64_t seed = 0;
  long rejected_count = 0;  // near-singular G redraws, expected rare
};

/// For each rep: N ~ N(0, sigma), G = N N^t - sigma; when the smallest
/// singular value of G falls below 1e-10 * ||sigma||_2 the draw is rejected
/// and redrawn within the same stream (counted), otherwise G^{-1} N^t and
/// the quadratic form are recorded. Rep k consumes only the stream-k
/// generator, so results do not depend on the thread count.
LimitSample limit_law_sample(const Eigen::MatrixXd& sigma, int reps, std::uint64_t seed,
                             int threads = 1);

/// Order statistic at the 1-based index ceil(q * size), lower tie. Sorted
/// internally; deterministic.
double quantile(const std::vector<double>& draws, double q);

/// Per-coordinate interval box theta_hat_i in [theta_hat_i - lower_offset_i,
/// theta_hat_i + upper_offset_i]. Each coordinate captures central limit-law
/// mass alpha / d between the (1/2 - alpha/2d) and (1/2 + alpha/2d)
/// quantiles of coordinate i of G^{-1}(N) N^t, rescaled by 1 / sqrt(n).
struct ConfidenceRegion {
  Eigen::VectorXd theta_hat;
  Eigen::VectorXd lower_offset;  // U_i >= 0
  Eigen::VectorXd upper_offset;  // V_i >= 0
  double nominal_alpha = 0.0;

  double lower_bound(int i) const { return theta_hat[i] - lower_offset[i]; }
  double upper_bound(int i) const { return theta_hat[i] + upper_offset[i]; }
  bool contains(const Eigen::VectorXd& theta) const;
};

ConfidenceRegion confidence_region(const Eigen::VectorXd& theta_hat,
                                   const Eigen::MatrixXd& sigma_hat, int n, double alpha,
                                   int reps = 100000, std::uint64_t seed = 0, int threads = 1);

/// Spectral data of the rank-two kernel (f(x)g(y) + f(y)g(x)) / 2 after
/// centering f and g under the invariant measure:
///   lambda_{1,2} = <f, g> +- ||f|| ||g||            (all in L2(mu))
///   phi_{1,2} proportional to f / ||f|| +- g / ||g||, L2(mu)-normalized.
struct MisesEigendata {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  LocallyConstantFn phi1, phi2;  // tables at depth max(f.depth, g.depth, r)
  bool degenerate = false;       // centered f, g colinear; the zero-eigenvalue
                                 // function is left as an all-zero table
};

MisesEigendata mises_eigendata(const GibbsSystem& sys, const LocallyConstantFn& f,
                               const LocallyConstantFn& g);

/// i.i.d. draws of lambda1 * Z1^2 + lambda2 * Z2^2 with Z_i standard normal.
std::vector<double> weighted_chisq_sample(double lambda1, double lambda2, int reps,
                                          std::uint64_t seed, int threads = 1);

struct EfficiencyDiagnostic {
  double lhs = 0.0;  // n * mean squared error of theta_hat over simulated fits
  double rhs = 0.0;  // Monte Carlo mean of ||G^{-1}(N) N^t||^2
};

/// Desk-scale comparison of the scaled estimator MSE against the limit law's
/// second moment. Both sides are seeded and deterministic. The rhs is heavy
/// tailed (the limit law has no finite second moment), so its Monte Carlo
/// mean is dominated by the most nearly singular draw; read it as an order
/// of magnitude, not a converged number.
EfficiencyDiagnostic efficiency_diagnostic(const SubshiftSpec& spec, const PotentialFamily& fam,
                                           const Eigen::VectorXd& theta, int n, int reps,
                                           std::uint64_t seed, const MleConfig& cfg = {},
                                           int rhs_reps = 10000, int threads = 1);

}  // namespace gibbsfit
