#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "gibbsfit/models.hpp"
#include "gibbsfit/thermo.hpp"
#include "support.hpp"

using namespace gibbsfit;

TEST_CASE("pressure of the zero potential is log of the Perron root") {
  // Full shift: lambda = alphabet size.
  for (int a : {2, 3, 5}) {
    auto fam = bernoulli_family(a);
    auto sys = solve_gibbs(full_shift(a), fam, Eigen::VectorXd::Zero(a - 1));
    CHECK(sys.lambda() == doctest::Approx(a).epsilon(1e-12));
    CHECK(sys.pressure() == doctest::Approx(std::log(a)).epsilon(1e-12));
  }

  // Golden mean: lambda solves x^2 = x + 1.
  auto sys = solve_gibbs(golden_mean_shift(), testsupport::golden_mean_unit_family(),
                         Eigen::VectorXd::Zero(1));
  CHECK(sys.lambda() == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("golden mean pressure against the quadratic closed form") {
  // F = theta * 1{x0 = 1}: the transfer matrix is [[0, e^t], [1, 1]], so
  // lambda solves lambda^2 - lambda - e^t = 0.
  auto spec = golden_mean_shift();
  auto fam = testsupport::golden_mean_unit_family();
  for (double t : {-1.3, 0.0, 0.7, 2.1}) {
    const double expect = (1.0 + std::sqrt(1.0 + 4.0 * std::exp(t))) / 2.0;
    Eigen::VectorXd theta(1);
    theta << t;
    CHECK(pressure(spec, fam, theta) == doctest::Approx(std::log(expect)).epsilon(1e-12));
  }
}

TEST_CASE("perron data invariants") {
  auto spec = golden_mean_shift();
  auto fam = markov_family(spec);
  Eigen::VectorXd theta(2);
  theta << 0.4, -0.9;
  auto sys = solve_gibbs(spec, fam, theta);

  // nu sums to one, <phi, nu> = 1, mu = phi .* nu is a probability vector.
  CHECK(sys.nu().sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sys.phi().dot(sys.nu()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sys.mu().sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sys.nu().minCoeff() > 0.0);
  CHECK(sys.phi().minCoeff() > 0.0);

  // Eigen equations for the raw transfer matrix.
  Eigen::MatrixXd A = sys.transfer();
  CHECK(((A * sys.nu() - sys.lambda() * sys.nu()).cwiseAbs().maxCoeff()) ==
        doctest::Approx(0.0).epsilon(1e-11));
  CHECK(((A.transpose() * sys.phi() - sys.lambda() * sys.phi()).cwiseAbs().maxCoeff()) ==
        doctest::Approx(0.0).epsilon(1e-11));

  // The induced chain is row stochastic and mu is its stationary vector.
  const Eigen::MatrixXd& Q = sys.transition();
  for (int i = 0; i < Q.rows(); ++i)
    CHECK(Q.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(((Q.transpose() * sys.mu() - sys.mu()).cwiseAbs().maxCoeff()) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sys.mu_edge().sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("iid cylinder measures are products of marginals") {
  auto fam = bernoulli_family(3);
  Eigen::VectorXd theta(2);
  theta << 0.3, -0.4;
  auto sys = solve_gibbs(full_shift(3), fam, theta);

  const double z = std::exp(0.3) + std::exp(-0.4) + 1.0;
  const double pi[3] = {std::exp(0.3) / z, std::exp(-0.4) / z, 1.0 / z};
  CHECK(sys.pressure() == doctest::Approx(std::log(z)).epsilon(1e-12));

  for (const Word& w :
       {Word({1}), Word({3, 2}), Word({2, 2, 1}), Word({1, 3, 1, 2, 3, 3})}) {
    double want = 1.0;
    for (int k = 0; k < w.size(); ++k) want *= pi[w[k] - 1];
    CHECK(invariant_cylinder_prob(sys, w) == doctest::Approx(want).epsilon(1e-12));
    // For an iid potential the eigenmeasure is the invariant measure.
    CHECK(std::exp(cylinder_log_prob(sys, w)) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("markov cylinder measures against the chain formula") {
  auto spec = full_shift(2);
  auto fam = markov_family(spec);
  Eigen::MatrixXd p(2, 2);
  p << 0.3, 0.7, 0.6, 0.4;
  auto sys = solve_gibbs(spec, fam, markov_to_theta(spec, p));

  const double pi1 = 0.6 / 1.3;  // stationary vector of p
  const double pi[2] = {pi1, 1.0 - pi1};
  for (const Word& w : {Word({1, 2}), Word({2, 1, 1}), Word({1, 2, 2, 1, 2})}) {
    double want = pi[w[0] - 1];
    for (int k = 0; k + 1 < w.size(); ++k) want *= p(w[k] - 1, w[k + 1] - 1);
    CHECK(invariant_cylinder_prob(sys, w) == doctest::Approx(want).epsilon(1e-12));
  }

  // Eigenmeasure of the markov potential: product of transitions over a
  // uniform initial weight.
  for (const Word& w : {Word({1, 2}), Word({2, 1, 1})}) {
    double want = 0.5;
    for (int k = 0; k + 1 < w.size(); ++k) want *= p(w[k] - 1, w[k + 1] - 1);
    CHECK(std::exp(cylinder_log_prob(sys, w)) == doctest::Approx(want).epsilon(1e-12));
  }

  // Pressure is -log p_aa in this parametrization.
  CHECK(sys.pressure() == doctest::Approx(-std::log(0.4)).epsilon(1e-12));
}

TEST_CASE("cylinder masses are additive and sum to one") {
  auto spec = golden_mean_shift();
  auto fam = markov_family(spec);
  Eigen::VectorXd theta(2);
  theta << -0.2, 0.8;
  auto sys = solve_gibbs(spec, fam, theta);

  double total = 0.0;
  for (const Word& w : enumerate_admissible_words(spec, 4)) {
    const double mass = invariant_cylinder_prob(sys, w);
    total += mass;
    double split = 0.0;
    for (int s = 1; s <= 2; ++s)
      if (spec.allowed(w.back(), s)) split += invariant_cylinder_prob(sys, w.appended(s));
    CHECK(split == doctest::Approx(mass).epsilon(1e-12));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("peeled eigenmeasure matches the iterated-operator oracle") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  for (const auto& spec : {full_shift(2), golden_mean_shift(), full_shift(3)}) {
    // One random depth-2 direction; random base at depth 1.
    PotentialFamily fam;
    fam.base.depth = 1;
    fam.base.values.resize(enumerate_admissible_words(spec, 1).size());
    for (double& v : fam.base.values) v = unif(gen);
    LocallyConstantFn dir(2, {});
    dir.values.resize(enumerate_admissible_words(spec, 2).size());
    for (double& v : dir.values) v = unif(gen);
    fam.dirs.push_back(dir);

    Eigen::VectorXd theta(1);
    theta << unif(gen);
    auto sys = solve_gibbs(spec, fam, theta);
    for (const Word& w : enumerate_admissible_words(spec, 4)) {
      const double direct = std::exp(cylinder_log_prob(sys, w));
      const double oracle = oracle_cylinder_prob(spec, fam, theta, w, 60);
      CHECK(direct == doctest::Approx(oracle).epsilon(1e-8));
    }
  }
}

TEST_CASE("pressure gradient equals the invariant means") {
  auto spec = golden_mean_shift();
  auto fam = markov_family(spec);
  Eigen::VectorXd theta(2);
  theta << 0.5, -0.3;
  auto sys = solve_gibbs(spec, fam, theta);

  Eigen::VectorXd grad = pressure_gradient(sys);
  // Direction i is the indicator of an admissible pair; its invariant mean
  // is the edge-cylinder mass of that pair.
  Eigen::VectorXd want(2);
  want << invariant_cylinder_prob(sys, Word({1, 2})), invariant_cylinder_prob(sys, Word({2, 1}));
  CHECK((grad - want).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));

  Eigen::VectorXd m = moment_vector(sys);
  REQUIRE(m.size() == 3);
  CHECK(m[0] == doctest::Approx(0.0).epsilon(1e-12));  // zero base
  CHECK(m[1] == doctest::Approx(grad[0]).epsilon(1e-12));
  CHECK(m[2] == doctest::Approx(grad[1]).epsilon(1e-12));
}

TEST_CASE("derivative checks: analytic vs central differences") {
  auto spec = golden_mean_shift();
  auto fam = markov_family(spec);
  Eigen::VectorXd theta(2);
  theta << 0.4, -0.6;
  auto rep = second_derivative_check(spec, fam, theta);
  CHECK(rep.max_gradient_diff <= 1e-6);
  CHECK(rep.max_hessian_diff <= 1e-5);
  // The pressure Hessian is the asymptotic covariance.
  CHECK(((rep.covariance - asymptotic_covariance(solve_gibbs(spec, fam, theta)))
             .cwiseAbs()
             .maxCoeff()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("iid covariance is the multinomial covariance") {
  auto fam = bernoulli_family(3);
  Eigen::VectorXd theta(2);
  theta << 0.3, -0.4;
  auto sys = solve_gibbs(full_shift(3), fam, theta);

  const double z = std::exp(0.3) + std::exp(-0.4) + 1.0;
  const double pi1 = std::exp(0.3) / z, pi2 = std::exp(-0.4) / z;
  Eigen::MatrixXd want(2, 2);
  want << pi1 * (1 - pi1), -pi1 * pi2, -pi1 * pi2, pi2 * (1 - pi2);

  CHECK(((asymptotic_covariance(sys) - want).cwiseAbs().maxCoeff()) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK(((green_kubo_covariance(sys) - want).cwiseAbs().maxCoeff()) ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("markov variance against the two-state closed form") {
  // Base potential log p makes the chain itself the Gibbs measure; the lone
  // direction is 1{x0 = 1}. Then sigma^2 = pi1 (1 - pi1) (1 + l) / (1 - l)
  // with l = 1 - p12 - p21 the second eigenvalue of p.
  auto spec = full_shift(2);
  PotentialFamily fam;
  fam.base = LocallyConstantFn(
      2, {std::log(0.3), std::log(0.7), std::log(0.6), std::log(0.4)});
  fam.dirs.push_back(LocallyConstantFn(1, {1.0, 0.0}));

  auto sys = solve_gibbs(spec, fam, Eigen::VectorXd::Zero(1));
  CHECK(sys.pressure() == doctest::Approx(0.0).epsilon(1e-12));

  const double pi1 = 0.6 / 1.3;
  const double l = 1.0 - 0.7 - 0.6;
  const double want = pi1 * (1.0 - pi1) * (1.0 + l) / (1.0 - l);
  CHECK(asymptotic_covariance(sys)(0, 0) == doctest::Approx(want).epsilon(1e-12));
  CHECK(green_kubo_covariance(sys)(0, 0) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("cohomology check separates independent directions from degenerate ones") {
  auto spec = full_shift(3);
  auto fam = bernoulli_family(3);
  auto rep = cohomology_independence_check(spec, fam, Eigen::VectorXd::Zero(2));
  CHECK(rep.independent);
  // Multinomial covariance at the uniform point has eigenvalues 1/9 and 1/3.
  CHECK(rep.min_eigenvalue == doctest::Approx(1.0 / 9.0).epsilon(1e-10));

  // Duplicated direction: the covariance is singular.
  PotentialFamily dup = fam;
  dup.dirs.push_back(dup.dirs[0]);
  auto bad = cohomology_independence_check(spec, dup, Eigen::VectorXd::Zero(3));
  CHECK_FALSE(bad.independent);
  CHECK(bad.min_eigenvalue <= 1e-8);

  // A coboundary g - g(shifted) has telescoping Birkhoff sums.
  auto gm = golden_mean_shift();
  PotentialFamily cob;
  cob.base = LocallyConstantFn(1, {0.0, 0.0});
  // g = 1{x0 = 1}: h(x0, x1) = g(x0) - g(x1) on words 12, 21, 22.
  cob.dirs.push_back(LocallyConstantFn(2, {1.0, -1.0, 0.0}));
  auto tele = cohomology_independence_check(gm, cob, Eigen::VectorXd::Zero(1));
  CHECK_FALSE(tele.independent);
  CHECK(std::abs(tele.min_eigenvalue) <= 1e-10);

  // Constants are coboundaries up to constants: also degenerate.
  PotentialFamily cst;
  cst.base = LocallyConstantFn(1, {0.0, 0.0});
  cst.dirs.push_back(LocallyConstantFn(1, {1.0, 1.0}));
  CHECK_FALSE(cohomology_independence_check(gm, cst, Eigen::VectorXd::Zero(1)).independent);
}

TEST_CASE("solver rejects inconsistent inputs") {
  auto spec = golden_mean_shift();
  auto fam = bernoulli_family(3);  // wrong alphabet: table sizes disagree
  CHECK_THROWS_AS(solve_gibbs(spec, fam, Eigen::VectorXd::Zero(2)), std::invalid_argument);

  auto ok = markov_family(spec);
  CHECK_THROWS_AS(solve_gibbs(spec, ok, Eigen::VectorXd::Zero(3)), std::invalid_argument);

  auto sys = solve_gibbs(spec, ok, Eigen::VectorXd::Zero(2));
  CHECK_THROWS_AS(cylinder_log_prob(sys, Word({1, 1})), std::invalid_argument);
  CHECK_THROWS_AS(invariant_cylinder_prob(sys, Word()), std::invalid_argument);
}
