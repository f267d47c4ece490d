#include "gibbsfit/models.hpp"

#include <cmath>
#include <stdexcept>

#include "gibbsfit/thermo.hpp"

namespace gibbsfit {

PotentialFamily bernoulli_family(int alphabet_size) {
  if (alphabet_size < 2)
    throw std::invalid_argument("bernoulli_family: alphabet size must be at least 2");
  PotentialFamily fam;
  fam.base = LocallyConstantFn(1, std::vector<double>(static_cast<std::size_t>(alphabet_size), 0.0));
  for (int i = 1; i < alphabet_size; ++i) {
    std::vector<double> tab(static_cast<std::size_t>(alphabet_size), 0.0);
    tab[static_cast<std::size_t>(i - 1)] = 1.0;
    fam.dirs.emplace_back(1, std::move(tab));
  }
  return fam;
}

PotentialFamily markov_family(const SubshiftSpec& spec) {
  const int a = spec.alphabet_size();
  if (!spec.allowed(a, a))
    throw std::invalid_argument("markov_family: the reference pair (a, a) must be admissible");
  const WordSpace pairs(spec, 2);
  PotentialFamily fam;
  fam.base = LocallyConstantFn(2, std::vector<double>(static_cast<std::size_t>(pairs.size()), 0.0));
  const int ref = pairs.index_checked(Word({a, a}));
  for (int k = 0; k < pairs.size(); ++k) {
    if (k == ref) continue;
    std::vector<double> tab(static_cast<std::size_t>(pairs.size()), 0.0);
    tab[static_cast<std::size_t>(k)] = 1.0;
    fam.dirs.emplace_back(2, std::move(tab));
  }
  return fam;
}

Eigen::VectorXd markov_to_theta(const SubshiftSpec& spec, const Eigen::MatrixXd& p) {
  const int a = spec.alphabet_size();
  if (p.rows() != a || p.cols() != a)
    throw std::invalid_argument("markov_to_theta: p must be a x a");
  if (!spec.allowed(a, a))
    throw std::invalid_argument("markov_to_theta: the reference pair (a, a) must be admissible");
  for (int i = 1; i <= a; ++i) {
    double row = 0.0;
    for (int j = 1; j <= a; ++j) {
      const double v = p(i - 1, j - 1);
      if (spec.allowed(i, j)) {
        if (!(v > 0.0))
          throw std::invalid_argument(
              "markov_to_theta: p must be positive on every admissible pair");
      } else if (std::abs(v) > 1e-14) {
        throw std::invalid_argument(
            "markov_to_theta: p has mass on a pair the incidence matrix forbids");
      }
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-10)
      throw std::invalid_argument("markov_to_theta: rows must sum to 1");
  }
  const double ref = std::log(p(a - 1, a - 1));
  const WordSpace pairs(spec, 2);
  Eigen::VectorXd theta(pairs.size() - 1);
  int k = 0;
  for (int e = 0; e < pairs.size(); ++e) {
    const Word& pw = pairs.word(e);
    if (pw[0] == a && pw[1] == a) continue;
    theta[k++] = std::log(p(pw[0] - 1, pw[1] - 1)) - ref;
  }
  return theta;
}

Eigen::MatrixXd theta_to_markov(const SubshiftSpec& spec, const Eigen::VectorXd& theta) {
  const int a = spec.alphabet_size();
  const GibbsSystem sys(spec, markov_family(spec), theta);
  // With depth-2 directions the operator order is 1, so the state chain is
  // indexed by single symbols and is the Markov transition matrix itself.
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(a, a);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j)
      if (spec.allowed(i + 1, j + 1)) p(i, j) = sys.transition()(i, j);
  return p;
}

}  // namespace gibbsfit
