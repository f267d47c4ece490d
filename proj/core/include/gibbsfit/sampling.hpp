#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "gibbsfit/rng.hpp"
#include "gibbsfit/thermo.hpp"

namespace gibbsfit {

/// A simulated trajectory together with its provenance.
struct SampleSeq {
  Word symbols;
  Eigen::VectorXd theta_true;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Draws X_0..X_{n-1} from the invariant measure of sys: the initial r-word
/// from the mu vector, then one symbol per step from the induced state chain.
/// Every k-cylinder marginal of the output law equals invariant_cylinder_prob.
SampleSeq sample_path(const GibbsSystem& sys, int n, std::uint64_t seed,
                      std::uint64_t stream = 0);

/// Same, drawing from a caller-owned generator.
Word sample_path(const GibbsSystem& sys, int n, Rng& rng);

/// alpha_n: Birkhoff averages of all d+1 family components (base first),
/// using the canonical-completion convention of birkhoff_sum.
Eigen::VectorXd empirical_moments(const SubshiftSpec& spec, const PotentialFamily& fam,
                                  const Word& w);

}  // namespace gibbsfit
