#include "gibbsfit/sampling.hpp"

#include <stdexcept>

namespace gibbsfit {

namespace {

// weights sum to 1 up to roundoff; the last positive entry absorbs the
// remainder so u close to 1 cannot fall off the end.
template <typename Row>
int pick_from_cdf(const Row& weights, double u) {
  double acc = 0.0;
  int last_positive = -1;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = static_cast<int>(i);
    if (u < acc) return static_cast<int>(i);
  }
  return last_positive;
}

}  // namespace

Word sample_path(const GibbsSystem& sys, int n, Rng& rng) {
  const int r = sys.order();
  if (n < r) throw std::invalid_argument("sample_path: n must be at least the operator order");
  int state = pick_from_cdf(sys.mu(), rng.next_uniform());
  Word out = sys.states().word(state);
  out.syms.reserve(static_cast<std::size_t>(n));
  for (int k = r; k < n; ++k) {
    const int next = pick_from_cdf(sys.transition().row(state), rng.next_uniform());
    out.syms.push_back(sys.states().word(next).back());
    state = next;
  }
  return out;
}

SampleSeq sample_path(const GibbsSystem& sys, int n, std::uint64_t seed, std::uint64_t stream) {
  Rng rng(seed, stream);
  SampleSeq s;
  s.symbols = sample_path(sys, n, rng);
  s.theta_true = sys.theta();
  s.seed = seed;
  s.stream = stream;
  return s;
}

Eigen::VectorXd empirical_moments(const SubshiftSpec& spec, const PotentialFamily& fam,
                                  const Word& w) {
  validate_family(spec, fam);
  if (w.size() < fam.common_depth())
    throw std::invalid_argument("empirical_moments: word shorter than the family depth");
  const double n = static_cast<double>(w.size());
  Eigen::VectorXd alpha(fam.dim() + 1);
  alpha[0] = birkhoff_sum(spec, fam.base, w) / n;
  for (int i = 0; i < fam.dim(); ++i)
    alpha[i + 1] = birkhoff_sum(spec, fam.dirs[static_cast<std::size_t>(i)], w) / n;
  return alpha;
}

}  // namespace gibbsfit
