#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "gibbsfit/asymptotics.hpp"
#include "gibbsfit/inference.hpp"

namespace gibbsfit {

/// Outcome of a likelihood-ratio test. The statistic is the ratio of the
/// null-constrained to the unconstrained maximal cylinder likelihood; values
/// above 1 occur when the null parameter lies outside the feasible set of
/// the unconstrained fit, and the test then accepts.
struct TestResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  double alpha = 0.0;
  double z_used = 0.0;
  std::optional<Eigen::VectorXd> theta_null_hat;
};

/// Tests H0: theta = theta0 against the unconstrained alternative. The
/// critical value is 1 / (1 + z) with z the upper-alpha quantile of the
/// limit quadratic form under the exact covariance at theta0, estimated
/// from `reps` seeded draws.
TestResult lr_test_simple(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w,
                          const Eigen::VectorXd& theta0, double alpha,
                          const MleConfig& cfg = {}, int reps = 100000,
                          std::uint64_t seed = 0, int threads = 1);

/// Tests H0: theta_k = 0 (k is 1-based). The null fit optimizes over the
/// family with direction k removed; the quadratic form's quantile uses the
/// plug-in covariance of the full direction set at that constrained fit.
/// Throws when the direction set is cohomologically degenerate there.
TestResult lr_test_influence(const SubshiftSpec& spec, const PotentialFamily& fam,
                             const Word& w, int k, double alpha, const MleConfig& cfg = {},
                             int reps = 100000, std::uint64_t seed = 0, int threads = 1);

/// Fixed-alternative likelihood-ratio comparison: rejects H0: theta = theta0
/// in favor of theta1 when nu_theta0([w]) / nu_theta1([w]) <= c. The level
/// constant c is the caller's; see np_calibrate.
TestResult np_test(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w,
                   const Eigen::VectorXd& theta0, const Eigen::VectorXd& theta1, double c,
                   const SolveOptions& opts = {});

/// Monte Carlo critical value: the lower `level` quantile of the np_test
/// statistic over `reps` simulated length-n samples drawn under theta0.
double np_calibrate(const SubshiftSpec& spec, const PotentialFamily& fam,
                    const Eigen::VectorXd& theta0, const Eigen::VectorXd& theta1, int n,
                    double level, int reps, std::uint64_t seed,
                    const SolveOptions& opts = {}, int threads = 1);

}  // namespace gibbsfit
