#include "gibbsfit/hypothesis.hpp"

#include <cmath>
#include <stdexcept>

#include "gibbsfit/parallel.hpp"
#include "gibbsfit/sampling.hpp"

namespace gibbsfit {

namespace {

double upper_alpha_xi_quantile(const Eigen::MatrixXd& sigma, double alpha, int reps,
                               std::uint64_t seed, int threads) {
  const LimitSample sample = limit_law_sample(sigma, reps, seed, threads);
  return quantile(sample.xi_draws, 1.0 - alpha);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("hypothesis test: alpha must lie in (0, 1)");
}

}  // namespace

TestResult lr_test_simple(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w,
                          const Eigen::VectorXd& theta0, double alpha, const MleConfig& cfg,
                          int reps, std::uint64_t seed, int threads) {
  check_alpha(alpha);
  if (theta0.size() != fam.dim())
    throw std::invalid_argument("lr_test_simple: theta0 has wrong dimension");

  const GibbsSystem null_sys(spec, fam, theta0, cfg.solve);
  const double null_ll = cylinder_log_prob(null_sys, w);

  const EstimationResult fit = mle(spec, fam, w, cfg);
  const GibbsSystem hat_sys(spec, fam, fit.theta_hat, cfg.solve);
  const double hat_ll = cylinder_log_prob(hat_sys, w);

  TestResult res;
  res.alpha = alpha;
  res.z_used =
      upper_alpha_xi_quantile(asymptotic_covariance(null_sys), alpha, reps, seed, threads);
  res.critical_value = 1.0 / (1.0 + res.z_used);
  res.statistic = std::exp(null_ll - hat_ll);
  res.reject = res.statistic <= res.critical_value;
  res.theta_null_hat = theta0;
  return res;
}

TestResult lr_test_influence(const SubshiftSpec& spec, const PotentialFamily& fam,
                             const Word& w, int k, double alpha, const MleConfig& cfg,
                             int reps, std::uint64_t seed, int threads) {
  check_alpha(alpha);
  const int d = fam.dim();
  if (k < 1 || k > d) throw std::invalid_argument("lr_test_influence: k out of range");

  // Constrained fit with theta_k pinned to zero: optimize the family with
  // direction k removed, then embed. One-direction families collapse to the
  // single null point 0.
  Eigen::VectorXd theta_null = Eigen::VectorXd::Zero(d);
  if (d > 1) {
    PotentialFamily reduced;
    reduced.base = fam.base;
    reduced.dirs.reserve(static_cast<std::size_t>(d - 1));
    for (int i = 0; i < d; ++i)
      if (i != k - 1) reduced.dirs.push_back(fam.dirs[static_cast<std::size_t>(i)]);

    MleConfig rcfg = cfg;
    if (cfg.box_lower.size() == d && cfg.box_upper.size() == d) {
      rcfg.box_lower.resize(d - 1);
      rcfg.box_upper.resize(d - 1);
      for (int i = 0, j = 0; i < d; ++i) {
        if (i == k - 1) continue;
        rcfg.box_lower[j] = cfg.box_lower[i];
        rcfg.box_upper[j] = cfg.box_upper[i];
        ++j;
      }
    }
    const EstimationResult rfit = mle(spec, reduced, w, rcfg);
    for (int i = 0, j = 0; i < d; ++i)
      if (i != k - 1) theta_null[i] = rfit.theta_hat[j++];
  }

  const GibbsSystem null_sys(spec, fam, theta_null, cfg.solve);
  const Eigen::MatrixXd sigma_hat = asymptotic_covariance(null_sys);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_hat);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() <= 1e-8 * scale)
      throw std::runtime_error(
          "lr_test_influence: direction set is cohomologically degenerate at the "
          "constrained fit");
  }

  const EstimationResult fit = mle(spec, fam, w, cfg);
  const GibbsSystem hat_sys(spec, fam, fit.theta_hat, cfg.solve);

  TestResult res;
  res.alpha = alpha;
  res.z_used = upper_alpha_xi_quantile(sigma_hat, alpha, reps, seed, threads);
  res.critical_value = 1.0 / (1.0 + res.z_used);
  res.statistic = std::exp(cylinder_log_prob(null_sys, w) - cylinder_log_prob(hat_sys, w));
  res.reject = res.statistic <= res.critical_value;
  res.theta_null_hat = theta_null;
  return res;
}

TestResult np_test(const SubshiftSpec& spec, const PotentialFamily& fam, const Word& w,
                   const Eigen::VectorXd& theta0, const Eigen::VectorXd& theta1, double c,
                   const SolveOptions& opts) {
  if (theta0.size() != fam.dim() || theta1.size() != fam.dim())
    throw std::invalid_argument("np_test: parameter dimension mismatch");
  if ((theta0 - theta1).cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("np_test: theta0 and theta1 must differ");
  if (!(c > 0.0)) throw std::invalid_argument("np_test: level constant must be positive");

  const GibbsSystem sys0(spec, fam, theta0, opts);
  const GibbsSystem sys1(spec, fam, theta1, opts);
  TestResult res;
  res.statistic = std::exp(cylinder_log_prob(sys0, w) - cylinder_log_prob(sys1, w));
  res.critical_value = c;
  res.reject = res.statistic <= c;
  return res;
}

double np_calibrate(const SubshiftSpec& spec, const PotentialFamily& fam,
                    const Eigen::VectorXd& theta0, const Eigen::VectorXd& theta1, int n,
                    double level, int reps, std::uint64_t seed, const SolveOptions& opts,
                    int threads) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("np_calibrate: level must lie in (0, 1)");
  if (reps < 1) throw std::invalid_argument("np_calibrate: reps must be positive");
  if ((theta0 - theta1).cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("np_calibrate: theta0 and theta1 must differ");

  const GibbsSystem sys0(spec, fam, theta0, opts);
  const GibbsSystem sys1(spec, fam, theta1, opts);
  std::vector<double> stats(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](int k) {
    const SampleSeq path = sample_path(sys0, n, seed, static_cast<std::uint64_t>(k));
    stats[static_cast<std::size_t>(k)] =
        std::exp(cylinder_log_prob(sys0, path.symbols) - cylinder_log_prob(sys1, path.symbols));
  });
  return quantile(stats, level);
}

}  // namespace gibbsfit
