#include "gibbsfit/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gibbsfit/parallel.hpp"
#include "gibbsfit/rng.hpp"
#include "gibbsfit/sampling.hpp"

namespace gibbsfit {

namespace {

// Factor L with L L^t = sigma from the symmetric eigendecomposition,
// rejecting asymmetric or decisively non-PSD input.
Eigen::MatrixXd gaussian_factor(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
    throw std::invalid_argument("gaussian_draw: covariance must be square and nonempty");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("gaussian_draw: covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  Eigen::VectorXd evals = es.eigenvalues();
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] < -1e-12 * scale)
      throw std::invalid_argument("gaussian_draw: covariance is not positive semidefinite");
    evals[i] = std::max(evals[i], 0.0);
  }
  return es.eigenvectors() * evals.cwiseSqrt().asDiagonal();
}

Eigen::VectorXd standard_gaussians(Rng& rng, Eigen::Index d) {
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.next_gaussian();
  return z;
}

}  // namespace

std::vector<Eigen::VectorXd> gaussian_draw(const Eigen::MatrixXd& sigma, std::uint64_t seed,
                                           int count) {
  if (count < 0) throw std::invalid_argument("gaussian_draw: count must be nonnegative");
  const Eigen::MatrixXd fac = gaussian_factor(sigma);
  std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Rng rng(seed, static_cast<std::uint64_t>(k));
    out[static_cast<std::size_t>(k)] = fac * standard_gaussians(rng, sigma.rows());
  }
  return out;
}

LimitSample limit_law_sample(const Eigen::MatrixXd& sigma, int reps, std::uint64_t seed,
                             int threads) {
  if (reps < 1) throw std::invalid_argument("limit_law_sample: reps must be positive");
  const Eigen::MatrixXd fac = gaussian_factor(sigma);
  const double sigma_norm = sigma.jacobiSvd().singularValues().maxCoeff();
  if (sigma_norm == 0.0)
    throw std::invalid_argument("limit_law_sample: zero covariance makes G always singular");
  const double reject_below = 1e-10 * sigma_norm;
  const Eigen::Index d = sigma.rows();

  LimitSample out;
  out.seed = seed;
  out.draws.resize(static_cast<std::size_t>(reps));
  out.xi_draws.resize(static_cast<std::size_t>(reps));
  std::vector<long> rejects(static_cast<std::size_t>(reps), 0);

  parallel_for(reps, threads, [&](int k) {
    Rng rng(seed, static_cast<std::uint64_t>(k));
    for (long attempt = 0;; ++attempt) {
      if (attempt >= 1000000)
        throw std::runtime_error("limit_law_sample: rejection rate implausibly high");
      const Eigen::VectorXd n_vec = fac * standard_gaussians(rng, d);
      const Eigen::MatrixXd g = n_vec * n_vec.transpose() - sigma;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.singularValues().minCoeff() < reject_below) {
        ++rejects[static_cast<std::size_t>(k)];
        continue;
      }
      const Eigen::VectorXd draw = svd.solve(n_vec);
      out.draws[static_cast<std::size_t>(k)] = draw;
      out.xi_draws[static_cast<std::size_t>(k)] = n_vec.dot(draw);
      break;
    }
  });
  for (long r : rejects) out.rejected_count += r;
  return out;
}

double quantile(const std::vector<double>& draws, double q) {
  if (draws.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q must lie in (0, 1)");
  std::vector<double> sorted(draws);
  std::sort(sorted.begin(), sorted.end());
  const auto m = static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil(q * m));
  if (idx < 1) idx = 1;
  if (idx > sorted.size()) idx = sorted.size();
  return sorted[idx - 1];
}

bool ConfidenceRegion::contains(const Eigen::VectorXd& theta) const {
  if (theta.size() != theta_hat.size())
    throw std::invalid_argument("ConfidenceRegion: dimension mismatch");
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const int ii = static_cast<int>(i);
    if (theta[i] < lower_bound(ii) || theta[i] > upper_bound(ii)) return false;
  }
  return true;
}

ConfidenceRegion confidence_region(const Eigen::VectorXd& theta_hat,
                                   const Eigen::MatrixXd& sigma_hat, int n, double alpha,
                                   int reps, std::uint64_t seed, int threads) {
  if (n < 1) throw std::invalid_argument("confidence_region: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("confidence_region: alpha must lie in (0, 1)");
  const Eigen::Index d = theta_hat.size();
  if (sigma_hat.rows() != d || sigma_hat.cols() != d)
    throw std::invalid_argument("confidence_region: covariance does not match theta_hat");

  const LimitSample sample = limit_law_sample(sigma_hat, reps, seed, threads);
  const double root_n = std::sqrt(static_cast<double>(n));
  const double half_mass = alpha / (2.0 * static_cast<double>(d));

  ConfidenceRegion region;
  region.theta_hat = theta_hat;
  region.nominal_alpha = alpha;
  region.lower_offset.resize(d);
  region.upper_offset.resize(d);
  std::vector<double> coord(sample.draws.size());
  for (Eigen::Index i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < sample.draws.size(); ++k) coord[k] = sample.draws[k][i];
    const double lo_q = quantile(coord, 0.5 - half_mass);
    const double hi_q = quantile(coord, 0.5 + half_mass);
    region.lower_offset[i] = std::max(0.0, -lo_q) / root_n;
    region.upper_offset[i] = std::max(0.0, hi_q) / root_n;
  }
  return region;
}

MisesEigendata mises_eigendata(const GibbsSystem& sys, const LocallyConstantFn& f,
                               const LocallyConstantFn& g) {
  const SubshiftSpec& spec = sys.spec();
  validate_fn(spec, f);
  validate_fn(spec, g);
  const int depth = std::max({f.depth, g.depth, sys.order()});
  const WordSpace ws(spec, depth);
  const std::size_t m = static_cast<std::size_t>(ws.size());

  Eigen::VectorXd weights(ws.size()), fv(ws.size()), gv(ws.size());
  const std::vector<double> ft = lift(spec, f, depth).values;
  const std::vector<double> gt = lift(spec, g, depth).values;
  for (int i = 0; i < ws.size(); ++i) {
    weights[i] = invariant_cylinder_prob(sys, ws.word(i));
    fv[i] = ft[static_cast<std::size_t>(i)];
    gv[i] = gt[static_cast<std::size_t>(i)];
  }

  fv.array() -= weights.dot(fv);
  gv.array() -= weights.dot(gv);
  const double f_norm = std::sqrt(weights.dot(fv.cwiseProduct(fv)));
  const double g_norm = std::sqrt(weights.dot(gv.cwiseProduct(gv)));
  const double fg = weights.dot(fv.cwiseProduct(gv));
  if (f_norm <= 1e-14 || g_norm <= 1e-14)
    throw std::invalid_argument("mises_eigendata: input is constant mu-a.e.");

  MisesEigendata out;
  out.lambda1 = fg + f_norm * g_norm;
  out.lambda2 = fg - f_norm * g_norm;

  const Eigen::VectorXd u = fv / f_norm;
  const Eigen::VectorXd v = gv / g_norm;
  auto normalized = [&](const Eigen::VectorXd& raw, LocallyConstantFn& dst) {
    const double norm2 = weights.dot(raw.cwiseProduct(raw));
    dst.depth = depth;
    dst.values.assign(m, 0.0);
    if (norm2 <= 1e-24) {
      out.degenerate = true;
      return;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < m; ++i)
      dst.values[i] = raw[static_cast<Eigen::Index>(i)] * inv;
  };
  normalized(u + v, out.phi1);
  normalized(u - v, out.phi2);
  return out;
}

std::vector<double> weighted_chisq_sample(double lambda1, double lambda2, int reps,
                                          std::uint64_t seed, int threads) {
  if (reps < 1) throw std::invalid_argument("weighted_chisq_sample: reps must be positive");
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2))
    throw std::invalid_argument("weighted_chisq_sample: weights must be finite");
  std::vector<double> out(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](int k) {
    Rng rng(seed, static_cast<std::uint64_t>(k));
    const double z1 = rng.next_gaussian();
    const double z2 = rng.next_gaussian();
    out[static_cast<std::size_t>(k)] = lambda1 * z1 * z1 + lambda2 * z2 * z2;
  });
  return out;
}

EfficiencyDiagnostic efficiency_diagnostic(const SubshiftSpec& spec, const PotentialFamily& fam,
                                           const Eigen::VectorXd& theta, int n, int reps,
                                           std::uint64_t seed, const MleConfig& cfg,
                                           int rhs_reps, int threads) {
  if (n < 1 || reps < 1 || rhs_reps < 1)
    throw std::invalid_argument("efficiency_diagnostic: n, reps and rhs_reps must be positive");
  const GibbsSystem sys(spec, fam, theta, cfg.solve);
  const Eigen::MatrixXd sigma = asymptotic_covariance(sys);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    if (es.eigenvalues().minCoeff() <= 1e-12)
      throw std::invalid_argument("efficiency_diagnostic: degenerate covariance");
  }

  std::vector<double> sq_err(static_cast<std::size_t>(reps));
  parallel_for(reps, threads, [&](int k) {
    const SampleSeq path = sample_path(sys, n, seed, static_cast<std::uint64_t>(k));
    const EstimationResult fit = mle(spec, fam, path.symbols, cfg);
    sq_err[static_cast<std::size_t>(k)] = (fit.theta_hat - theta).squaredNorm();
  });

  EfficiencyDiagnostic out;
  for (double e : sq_err) out.lhs += e;
  out.lhs *= static_cast<double>(n) / static_cast<double>(reps);

  // Separate the reference draws from the sampling streams above.
  const LimitSample ref = limit_law_sample(sigma, rhs_reps, seed ^ 0x517cc1b727220a95ULL, threads);
  for (const Eigen::VectorXd& dr : ref.draws) out.rhs += dr.squaredNorm();
  out.rhs /= static_cast<double>(rhs_reps);
  return out;
}

}  // namespace gibbsfit
