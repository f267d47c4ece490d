#include "gibbsfit/potential.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gibbsfit {

void validate_fn(const SubshiftSpec& spec, const LocallyConstantFn& f) {
  if (f.depth < 1)
    throw std::invalid_argument("LocallyConstantFn: depth must be at least 1");
  const std::size_t want = enumerate_admissible_words(spec, f.depth).size();
  if (f.values.size() != want)
    throw std::invalid_argument(
        "LocallyConstantFn: table has " + std::to_string(f.values.size()) +
        " entries, expected " + std::to_string(want) + " for depth " +
        std::to_string(f.depth));
  for (double v : f.values)
    if (!std::isfinite(v))
      throw std::invalid_argument("LocallyConstantFn: non-finite table entry");
}

double evaluate(const SubshiftSpec& spec, const LocallyConstantFn& f, const Word& w) {
  if (w.size() < f.depth)
    throw std::invalid_argument("evaluate: word shorter than function depth");
  WordSpace ws(spec, f.depth);
  return f.values[static_cast<std::size_t>(ws.index_checked(w.prefix(f.depth)))];
}

LocallyConstantFn lift(const SubshiftSpec& spec, const LocallyConstantFn& f, int new_depth) {
  validate_fn(spec, f);
  if (new_depth < f.depth)
    throw std::invalid_argument("lift: new depth is smaller than current depth");
  if (new_depth == f.depth) return f;
  WordSpace shallow(spec, f.depth);
  WordSpace deep(spec, new_depth);
  LocallyConstantFn out;
  out.depth = new_depth;
  out.values.resize(static_cast<std::size_t>(deep.size()));
  for (int i = 0; i < deep.size(); ++i) {
    int j = shallow.index_checked(deep.word(i).prefix(f.depth));
    out.values[static_cast<std::size_t>(i)] = f.values[static_cast<std::size_t>(j)];
  }
  return out;
}

LocallyConstantFn add(const SubshiftSpec& spec, const LocallyConstantFn& f,
                      const LocallyConstantFn& g) {
  const int depth = std::max(f.depth, g.depth);
  LocallyConstantFn a = lift(spec, f, depth);
  LocallyConstantFn b = lift(spec, g, depth);
  for (std::size_t i = 0; i < a.values.size(); ++i) a.values[i] += b.values[i];
  return a;
}

LocallyConstantFn scale(const LocallyConstantFn& f, double c) {
  LocallyConstantFn out = f;
  for (double& v : out.values) v *= c;
  return out;
}

int PotentialFamily::common_depth() const {
  int depth = base.depth;
  for (const auto& f : dirs) depth = std::max(depth, f.depth);
  return depth;
}

void validate_family(const SubshiftSpec& spec, const PotentialFamily& fam) {
  if (fam.dirs.empty())
    throw std::invalid_argument("PotentialFamily: needs at least one direction");
  validate_fn(spec, fam.base);
  for (const auto& f : fam.dirs) validate_fn(spec, f);
}

LocallyConstantFn assemble_potential(const SubshiftSpec& spec, const PotentialFamily& fam,
                                     const Eigen::VectorXd& theta) {
  validate_family(spec, fam);
  if (theta.size() != fam.dim())
    throw std::invalid_argument("assemble_potential: theta has wrong dimension");
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (!std::isfinite(theta[i]))
      throw std::invalid_argument("assemble_potential: non-finite parameter entry");
  LocallyConstantFn out = lift(spec, fam.base, fam.common_depth());
  for (int i = 0; i < fam.dim(); ++i) {
    LocallyConstantFn fi = lift(spec, fam.dirs[static_cast<std::size_t>(i)], fam.common_depth());
    for (std::size_t k = 0; k < out.values.size(); ++k)
      out.values[k] += theta[i] * fi.values[k];
  }
  return out;
}

double birkhoff_sum(const SubshiftSpec& spec, const LocallyConstantFn& f, const Word& w) {
  validate_fn(spec, f);
  if (w.empty()) throw std::invalid_argument("birkhoff_sum: empty word");
  if (!spec.admissible(w))
    throw std::invalid_argument("birkhoff_sum: word '" + w.str() + "' is not admissible");
  const int n = w.size();
  const int m = f.depth;
  const Word ext = spec.canonical_extension(w, m > 1 ? m - 1 : 0);
  WordSpace ws(spec, m);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    Word window(std::vector<int>(ext.syms.begin() + k, ext.syms.begin() + k + m));
    sum += f.values[static_cast<std::size_t>(ws.index_checked(window))];
  }
  return sum;
}

}  // namespace gibbsfit
