#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "gibbsfit/asymptotics.hpp"
#include "gibbsfit/models.hpp"
#include "support.hpp"

using namespace gibbsfit;

TEST_CASE("gaussian draws: prefix stability, moments, input checks") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 0.6, 0.6, 1.0;

  auto five = gaussian_draw(sigma, 77, 5);
  auto ten = gaussian_draw(sigma, 77, 10);
  REQUIRE(five.size() == 5);
  for (int k = 0; k < 5; ++k)
    CHECK((five[static_cast<std::size_t>(k)].array() ==
           ten[static_cast<std::size_t>(k)].array())
              .all());

  // Sample covariance near sigma.
  auto many = gaussian_draw(sigma, 77, 40000);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2, 2);
  for (const auto& v : many) acc += v * v.transpose();
  acc /= static_cast<double>(many.size());
  CHECK((acc - sigma).cwiseAbs().maxCoeff() < 0.05);

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(gaussian_draw(asym, 1, 1), std::invalid_argument);

  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(gaussian_draw(indef, 1, 1), std::invalid_argument);

  // Exact rank deficiency is legal (degenerate Gaussian on a line).
  Eigen::MatrixXd rank1 = Eigen::VectorXd::Ones(2) * Eigen::VectorXd::Ones(2).transpose();
  auto flat = gaussian_draw(rank1, 3, 100);
  for (const auto& v : flat) CHECK(v[0] == doctest::Approx(v[1]).epsilon(1e-12));
}

TEST_CASE("scalar limit law matches the direct formula") {
  const double s2 = 0.21;  // variance
  Eigen::MatrixXd sigma(1, 1);
  sigma << s2;
  auto ls = limit_law_sample(sigma, 300, 5);
  REQUIRE(ls.draws.size() == 300);
  CHECK(ls.rejected_count == 0);

  for (int k = 0; k < 300; ++k) {
    Rng rng(5, static_cast<std::uint64_t>(k));
    const double n = std::sqrt(s2) * rng.next_gaussian();
    const double want = n / (n * n - s2);
    CHECK(ls.draws[static_cast<std::size_t>(k)][0] == doctest::Approx(want).epsilon(1e-12));
    CHECK(ls.xi_draws[static_cast<std::size_t>(k)] ==
          doctest::Approx(n * want).epsilon(1e-12));
  }
}

TEST_CASE("vector limit law satisfies the rank-one-update identities") {
  // G = N N^t - Sigma gives G^{-1} N = Sigma^{-1} N / (q - 1) and
  // xi = q / (q - 1) with q = N^t Sigma^{-1} N, so N is recoverable from the
  // outputs and must satisfy the quadratic-form relation.
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 0.5;
  auto ls = limit_law_sample(sigma, 400, 9);
  for (int k = 0; k < 400; ++k) {
    const double xi = ls.xi_draws[static_cast<std::size_t>(k)];
    const Eigen::VectorXd& draw = ls.draws[static_cast<std::size_t>(k)];
    const Eigen::VectorXd n = sigma * draw / (xi - 1.0);
    const double q = n.dot(sigma.ldlt().solve(n));
    CHECK(q == doctest::Approx(xi / (xi - 1.0)).epsilon(1e-8));
  }
}

TEST_CASE("xi distribution is the mapped chi squared, free of sigma") {
  Eigen::MatrixXd sigma(2, 2);
  sigma << 0.8, -0.25, -0.25, 1.7;
  auto ls = limit_law_sample(sigma, 20000, 31);

  boost::math::chi_squared chi2(2.0);
  const double f1 = boost::math::cdf(chi2, 1.0);
  auto cdf = [&](double x) {
    if (x < 0.0) return f1 - boost::math::cdf(chi2, x / (x - 1.0));
    if (x <= 1.0) return f1;
    return f1 + 1.0 - boost::math::cdf(chi2, x / (x - 1.0));
  };
  CHECK(testsupport::ks_distance_cdf(ls.xi_draws, cdf) < 0.015);
}

TEST_CASE("limit law rejects a zero covariance and is thread-count invariant") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(limit_law_sample(zero, 10, 0), std::invalid_argument);

  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.2, 0.2, 0.6;
  auto one = limit_law_sample(sigma, 500, 4, 1);
  auto four = limit_law_sample(sigma, 500, 4, 4);
  for (int k = 0; k < 500; ++k) {
    CHECK(one.xi_draws[static_cast<std::size_t>(k)] ==
          four.xi_draws[static_cast<std::size_t>(k)]);
    CHECK((one.draws[static_cast<std::size_t>(k)].array() ==
           four.draws[static_cast<std::size_t>(k)].array())
              .all());
  }
  CHECK(one.rejected_count == four.rejected_count);
}

TEST_CASE("quantile takes the lower order statistic at ceil(q m)") {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);  // unsorted on purpose
  CHECK(quantile(v, 0.5) == 50.0);
  CHECK(quantile(v, 0.501) == 51.0);
  CHECK(quantile(v, 0.011) == 2.0);
  CHECK(quantile(v, 0.99) == 99.0);
  CHECK(quantile(v, 0.999) == 100.0);
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(quantile(v, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile(v, 1.0), std::invalid_argument);
}

TEST_CASE("confidence region mechanics") {
  Eigen::VectorXd hat(2);
  hat << 0.5, -1.0;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1.0, 0.0, 0.0, 1.0;

  auto region = confidence_region(hat, sigma, 400, 0.1, 20000, 12);
  CHECK(region.nominal_alpha == 0.1);
  CHECK(region.theta_hat.isApprox(hat));
  for (int i = 0; i < 2; ++i) {
    CHECK(region.lower_offset[i] >= 0.0);
    CHECK(region.upper_offset[i] >= 0.0);
    CHECK(region.lower_bound(i) == doctest::Approx(hat[i] - region.lower_offset[i]));
    CHECK(region.upper_bound(i) == doctest::Approx(hat[i] + region.upper_offset[i]));
  }
  CHECK(region.contains(hat));
  Eigen::VectorXd far(2);
  far << 5.0, -1.0;
  CHECK_FALSE(region.contains(far));
  CHECK_THROWS_AS(region.contains(Eigen::VectorXd::Zero(3)), std::invalid_argument);

  // Same inputs, same region; offsets shrink like 1/sqrt(n).
  auto again = confidence_region(hat, sigma, 400, 0.1, 20000, 12);
  CHECK((again.lower_offset.array() == region.lower_offset.array()).all());
  auto wider = confidence_region(hat, sigma, 100, 0.1, 20000, 12);
  CHECK(wider.upper_offset[0] == doctest::Approx(2.0 * region.upper_offset[0]).epsilon(1e-12));

  CHECK_THROWS_AS(confidence_region(hat, sigma, 0, 0.1, 100, 1), std::invalid_argument);
  CHECK_THROWS_AS(confidence_region(hat, sigma, 100, 1.5, 100, 1), std::invalid_argument);
}

TEST_CASE("mises eigendata on the uniform three-shift") {
  auto fam = bernoulli_family(3);
  auto sys = solve_gibbs(full_shift(3), fam, Eigen::VectorXd::Zero(2));
  LocallyConstantFn f(1, {1.0, 0.0, 0.0});
  LocallyConstantFn g(1, {0.0, 1.0, 0.0});

  auto eg = mises_eigendata(sys, f, g);
  CHECK_FALSE(eg.degenerate);
  // <f~, g~> = -1/9 and ||f~|| ||g~|| = 2/9 under the uniform measure.
  CHECK(eg.lambda1 == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(eg.lambda2 == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));

  // Orthonormality in L2(mu) and the pointwise kernel identity.
  const auto& mu = sys.mu();
  auto dot = [&](const LocallyConstantFn& u, const LocallyConstantFn& v) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      s += mu[i] * u.values[static_cast<std::size_t>(i)] * v.values[static_cast<std::size_t>(i)];
    return s;
  };
  CHECK(dot(eg.phi1, eg.phi1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dot(eg.phi2, eg.phi2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dot(eg.phi1, eg.phi2) == doctest::Approx(0.0).epsilon(1e-12));

  const double fc[3] = {2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0};
  const double gc[3] = {-1.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0};
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      const double lhs = fc[x] * gc[y] + fc[y] * gc[x];
      const double rhs =
          eg.lambda1 * eg.phi1.values[static_cast<std::size_t>(x)] *
              eg.phi1.values[static_cast<std::size_t>(y)] +
          eg.lambda2 * eg.phi2.values[static_cast<std::size_t>(x)] *
              eg.phi2.values[static_cast<std::size_t>(y)];
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("mises eigendata: degenerate pair and mixed depths") {
  auto fam = bernoulli_family(2);
  auto sys = solve_gibbs(full_shift(2), fam, Eigen::VectorXd::Zero(1));
  LocallyConstantFn f(1, {1.0, 0.0});

  auto eg = mises_eigendata(sys, f, scale(f, -3.0));
  CHECK(eg.degenerate);
  // lambda1 = <f~, -3 f~> + 3 ||f~||^2 = 0, lambda2 = -6 ||f~||^2 = -3/2.
  CHECK(eg.lambda1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eg.lambda2 == doctest::Approx(-1.5).epsilon(1e-12));

  LocallyConstantFn zero(1, {0.0, 0.0});
  CHECK_THROWS_AS(mises_eigendata(sys, f, zero), std::invalid_argument);
}

TEST_CASE("birkhoff product identity for the rank-two kernel") {
  auto spec = golden_mean_shift();
  auto fam = markov_family(spec);
  Eigen::VectorXd theta(2);
  theta << 0.4, -0.9;
  auto sys = solve_gibbs(spec, fam, theta);

  LocallyConstantFn f(1, {1.0, -0.5});
  LocallyConstantFn g(2, {0.3, -0.2, 0.1});
  auto eg = mises_eigendata(sys, f, g);
  REQUIRE_FALSE(eg.degenerate);

  auto mean_of = [&](const LocallyConstantFn& u) {
    double s = 0.0;
    for (const Word& w : enumerate_admissible_words(spec, u.depth))
      s += invariant_cylinder_prob(sys, w) * evaluate(spec, u, w);
    return s;
  };
  const double mf = mean_of(f), mg = mean_of(g);

  for (const Word& w : enumerate_admissible_words(spec, 5)) {
    const double sf = birkhoff_sum(spec, f, w) - 5.0 * mf;
    const double sg = birkhoff_sum(spec, g, w) - 5.0 * mg;
    const double s1 = birkhoff_sum(spec, eg.phi1, w);
    const double s2 = birkhoff_sum(spec, eg.phi2, w);
    CHECK(std::abs(sf * sg - 0.5 * (eg.lambda1 * s1 * s1 + eg.lambda2 * s2 * s2)) < 1e-10);
  }
}

TEST_CASE("weighted chi squared sampler") {
  auto draws = weighted_chisq_sample(1.0, 0.0, 10000, 21);
  boost::math::chi_squared chi1(1.0);
  CHECK(testsupport::ks_distance_cdf(draws, [&](double x) {
          return x <= 0.0 ? 0.0 : boost::math::cdf(chi1, x);
        }) < 0.02);

  auto mix = weighted_chisq_sample(0.4, -0.3, 50000, 22);
  double mean = 0.0, second = 0.0;
  for (double x : mix) {
    mean += x;
    second += x * x;
  }
  mean /= static_cast<double>(mix.size());
  second /= static_cast<double>(mix.size());
  // E = l1 + l2, Var = 2 l1^2 + 2 l2^2.
  CHECK(mean == doctest::Approx(0.1).epsilon(0.15));
  CHECK(second - mean * mean == doctest::Approx(0.5).epsilon(0.1));

  auto again = weighted_chisq_sample(0.4, -0.3, 100, 22);
  for (int k = 0; k < 100; ++k)
    CHECK(again[static_cast<std::size_t>(k)] == mix[static_cast<std::size_t>(k)]);
}

TEST_CASE("efficiency diagnostic is invariant under direction rescaling") {
  auto spec = full_shift(2);
  auto fam = bernoulli_family(2);
  Eigen::VectorXd theta(1);
  theta << 0.2;
  const int n = 512;

  MleConfig cfg;  // defaults: eta(n), box +-1/eta
  auto base = efficiency_diagnostic(spec, fam, theta, n, 20, 6, cfg, 2000);
  CHECK(base.lhs > 0.0);
  CHECK(base.rhs > 0.0);

  // Scale the direction by c = 2: theta halves, eta grows by sqrt(c) and the
  // box shrinks by c, after which both sides pick up exactly 1/c^2.
  const double c = 2.0;
  PotentialFamily scaled = fam;
  scaled.dirs[0] = scale(fam.dirs[0], c);
  MleConfig cfg2;
  cfg2.eta = default_eta(n) * std::sqrt(c);
  cfg2.box_lower = Eigen::VectorXd::Constant(1, -1.0 / default_eta(n) / c);
  cfg2.box_upper = Eigen::VectorXd::Constant(1, 1.0 / default_eta(n) / c);
  auto half = efficiency_diagnostic(spec, scaled, theta / c, n, 20, 6, cfg2, 2000);

  CHECK(half.lhs * c * c == doctest::Approx(base.lhs).epsilon(1e-6));
  CHECK(half.rhs * c * c == doctest::Approx(base.rhs).epsilon(1e-9));
}
