#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gibbsfit/potential.hpp"
#include "gibbsfit/subshift.hpp"

namespace gibbsfit {

struct SolveOptions {
  double tol = 1e-13;      // relative residual target for both Perron vectors
  int max_iter = 100000;   // power iteration cap before giving up
};

/// Perron data of the transfer operator for F_theta, together with the
/// induced state chain. States are the admissible r-words where
/// r = max(common depth - 1, 1); edges are the (r+1)-words. The matrix entry
/// for edge u -> v is exp(F(u . v_last)); nu is its right Perron vector
/// (eigenmeasure, normalized to total mass 1), phi the left one
/// (eigenfunction, normalized so that <phi, nu> = 1), and mu = phi .* nu the
/// invariant cylinder masses.
class GibbsSystem {
 public:
  GibbsSystem(const SubshiftSpec& spec, const PotentialFamily& fam,
              const Eigen::VectorXd& theta, const SolveOptions& opts = {});

  const SubshiftSpec& spec() const { return spec_; }
  const PotentialFamily& family() const { return fam_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  int dim() const { return fam_.dim(); }

  int order() const { return order_; }
  double lambda() const { return lambda_; }
  double pressure() const { return pressure_; }

  const WordSpace& states() const { return states_; }
  const WordSpace& edges() const { return edges_; }

  const Eigen::VectorXd& nu() const { return nu_; }
  const Eigen::VectorXd& phi() const { return phi_; }
  const Eigen::VectorXd& mu() const { return mu_; }

  /// Raw transfer matrix, entry (u, v) = exp F(u . v_last) on admissible
  /// steps. May overflow to inf for extreme parameters; the solver itself
  /// works on a shifted copy and is not affected.
  Eigen::MatrixXd transfer() const;

  /// Potential table aligned with edges(), lifted to depth r+1.
  const std::vector<double>& edge_potential() const { return F_edge_; }
  /// Direction tables f_1..f_d lifted to depth r+1, aligned with edges().
  const std::vector<std::vector<double>>& edge_dirs() const { return dir_edge_; }
  /// Base table f_0 lifted likewise.
  const std::vector<double>& edge_base() const { return base_edge_; }

  int edge_src(int e) const { return edge_src_[static_cast<std::size_t>(e)]; }
  int edge_dst(int e) const { return edge_dst_[static_cast<std::size_t>(e)]; }

  /// Forward transition kernel of the invariant measure on r-words,
  /// row-stochastic (rows renormalized to kill residual drift).
  const Eigen::MatrixXd& transition() const { return transition_; }

  /// Invariant masses of the (r+1)-cylinders, aligned with edges().
  const Eigen::VectorXd& mu_edge() const { return mu_edge_; }

 private:
  SubshiftSpec spec_;
  PotentialFamily fam_;
  Eigen::VectorXd theta_;
  int order_;
  WordSpace states_;
  WordSpace edges_;
  std::vector<double> F_edge_;
  std::vector<std::vector<double>> dir_edge_;
  std::vector<double> base_edge_;
  std::vector<int> edge_src_, edge_dst_;
  double lambda_ = 0.0;
  double pressure_ = 0.0;
  Eigen::VectorXd nu_, phi_, mu_, mu_edge_;
  Eigen::MatrixXd transition_;
};

inline GibbsSystem solve_gibbs(const SubshiftSpec& spec, const PotentialFamily& fam,
                               const Eigen::VectorXd& theta, const SolveOptions& opts = {}) {
  return GibbsSystem(spec, fam, theta, opts);
}

/// Topological pressure P(F_theta) = log lambda.
double pressure(const SubshiftSpec& spec, const PotentialFamily& fam,
                const Eigen::VectorXd& theta, const SolveOptions& opts = {});

/// Gradient of theta -> P(F_theta): the invariant means of f_1..f_d.
Eigen::VectorXd pressure_gradient(const GibbsSystem& sys);
Eigen::VectorXd pressure_gradient(const SubshiftSpec& spec, const PotentialFamily& fam,
                                  const Eigen::VectorXd& theta, const SolveOptions& opts = {});

/// Invariant means of all d+1 family components, base first.
Eigen::VectorXd moment_vector(const GibbsSystem& sys);

/// Asymptotic covariance matrix of the directions under the invariant
/// measure: variance plus twice the summed autocovariances, computed exactly
/// by solving the Poisson equation on the edge chain.
Eigen::MatrixXd asymptotic_covariance(const GibbsSystem& sys);

/// Same quantity as a truncated autocovariance series; serves as an
/// independent cross-check of the Poisson route.
Eigen::MatrixXd green_kubo_covariance(const GibbsSystem& sys, double term_tol = 1e-14,
                                      int max_lag = 1000000);

/// log nu([w]) for |w| >= r via the exact peeling identity.
double cylinder_log_prob(const GibbsSystem& sys, const Word& w);

/// mu([w]) for |w| >= r via the induced state chain.
double invariant_cylinder_prob(const GibbsSystem& sys, const Word& w);

/// Eigenmeasure mass of [w] approximated by iterating the transfer operator
/// on the indicator of [w] against the constant function, with uniform
/// averaging at the end. Shares no code with the peeling route; ratios of
/// iterates converge at the spectral-gap rate.
double oracle_cylinder_prob(const SubshiftSpec& spec, const PotentialFamily& fam,
                            const Eigen::VectorXd& theta, const Word& w, int iters);

struct SecondDerivativeReport {
  Eigen::VectorXd analytic_gradient;
  Eigen::VectorXd fd_gradient;
  Eigen::MatrixXd covariance;       // analytic Hessian of the pressure
  Eigen::MatrixXd fd_hessian;
  double max_gradient_diff = 0.0;
  double max_hessian_diff = 0.0;
};

/// Central-difference check of the pressure derivatives against the analytic
/// gradient and the asymptotic covariance.
SecondDerivativeReport second_derivative_check(const SubshiftSpec& spec,
                                               const PotentialFamily& fam,
                                               const Eigen::VectorXd& theta,
                                               double h_grad = 1e-4, double h_hess = 1e-3,
                                               const SolveOptions& opts = {});

struct CohomologyReport {
  double min_eigenvalue = 0.0;
  bool independent = false;
};

/// The directions are independent as cohomology classes iff the asymptotic
/// covariance is positive definite; degeneracy shows up as a (numerically)
/// zero eigenvalue.
CohomologyReport cohomology_independence_check(const SubshiftSpec& spec,
                                               const PotentialFamily& fam,
                                               const Eigen::VectorXd& theta,
                                               double tol = 1e-8,
                                               const SolveOptions& opts = {});

}  // namespace gibbsfit
