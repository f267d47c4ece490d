#pragma once

#include <Eigen/Dense>

#include "gibbsfit/potential.hpp"
#include "gibbsfit/subshift.hpp"

namespace gibbsfit {

/// Independent symbols on the full shift over a symbols: f0 = 0 and the
/// directions are the depth-1 indicators of [1], ..., [a-1], so d = a - 1 and
/// the invariant marginal of symbol i is pi_i = e^{theta_i} / sum_j e^{theta_j}
/// with theta_a fixed at 0.
PotentialFamily bernoulli_family(int alphabet_size);

/// Depth-2 indicator directions for every admissible symbol pair except
/// (a, a), in lex order, with f0 = 0. Requires the pair (a, a) itself to be
/// admissible. The Gibbs measures of this family are exactly the mixing
/// Markov chains supported on the incidence graph.
PotentialFamily markov_family(const SubshiftSpec& spec);

/// Coordinates of a stochastic matrix in the markov_family parametrization:
/// theta_(i,j) = log p_ij - log p_aa over admissible pairs in lex order with
/// (a, a) omitted. p must be supported exactly on the admissible pairs, and
/// p_aa here equals the normalizer a - sum of the remaining entries.
Eigen::VectorXd markov_to_theta(const SubshiftSpec& spec, const Eigen::MatrixXd& p);

/// Transition matrix of the Gibbs measure of markov_family at theta; inverse
/// of markov_to_theta on its image, and well defined for every theta (a
/// depth-2 Gibbs measure is always a two-step Markov chain on symbols).
Eigen::MatrixXd theta_to_markov(const SubshiftSpec& spec, const Eigen::VectorXd& theta);

}  // namespace gibbsfit
