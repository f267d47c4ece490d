#pragma once

// Shared helpers for the test suites: small model builders, two-sample

// statistics, and reference randomness that is independent of the library's

// own generator.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gibbsfit/models.hpp"
#include "gibbsfit/potential.hpp"
#include "gibbsfit/subshift.hpp"

namespace testsupport {

// One-direction family on the golden-mean shift with F = theta * dir.
inline gibbsfit::PotentialFamily golden_mean_unit_family() {
  gibbsfit::PotentialFamily fam;
  fam.base = gibbsfit::LocallyConstantFn(1, {0.0, 0.0});
  fam.dirs.push_back(gibbsfit::LocallyConstantFn(1, {1.0, 0.0}));
  return fam;
}

// Two-sample Kolmogorov-Smirnov distance between empirical laws.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / static_cast<double>(a.size());
    const double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

// One-sample KS distance against a cdf given as a callable.
template <typename Cdf>
double ks_distance_cdf(std::vector<double> a, Cdf cdf) {
  std::sort(a.begin(), a.end());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    const double lo = static_cast<double>(i) / static_cast<double>(a.size());
    const double hi = static_cast<double>(i + 1) / static_cast<double>(a.size());
    d = std::max({d, std::abs(f - lo), std::abs(f - hi)});
  }
  return d;
}

// Random stochastic matrix supported exactly on the incidence pattern,
// entries bounded away from zero.
inline Eigen::MatrixXd random_stochastic_on(const gibbsfit::SubshiftSpec& spec,
                                            std::mt19937_64& gen) {
  const int a = spec.alphabet_size();
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(a, a);
  for (int i = 1; i <= a; ++i) {
    double row = 0.0;
    for (int j = 1; j <= a; ++j)
      if (spec.allowed(i, j)) {
        p(i - 1, j - 1) = unif(gen);
        row += p(i - 1, j - 1);
      }
    p.row(i - 1) /= row;
  }
  return p;
}

// Uniformly random primitive incidence matrix containing the (a,a) self loop.
inline Eigen::MatrixXi random_primitive_incidence(int a, std::mt19937_64& gen) {
  std::bernoulli_distribution coin(0.6);
  while (true) {
    Eigen::MatrixXi inc(a, a);
    for (int i = 0; i < a; ++i)
      for (int j = 0; j < a; ++j) inc(i, j) = coin(gen) ? 1 : 0;
    inc(a - 1, a - 1) = 1;
    if (gibbsfit::is_primitive(inc)) return inc;
  }
}

// Word of k ones followed by n-k twos (full-shift alphabet {1,2}).
inline gibbsfit::Word count_word(int n, int k) {
  std::vector<int> syms(static_cast<std::size_t>(n), 2);
  for (int i = 0; i < k; ++i) syms[static_cast<std::size_t>(i)] = 1;
  return gibbsfit::Word(std::move(syms));
}

}  // namespace testsupport
