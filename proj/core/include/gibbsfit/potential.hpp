#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gibbsfit/subshift.hpp"

namespace gibbsfit {

/// A function of the first `depth` coordinates of a point in the shift space:
/// one value per admissible depth-word, in WordSpace enumeration order.
struct LocallyConstantFn {
  int depth = 1;
  std::vector<double> values;

  LocallyConstantFn() = default;
  LocallyConstantFn(int depth_, std::vector<double> values_)
      : depth(depth_), values(std::move(values_)) {}
};

/// Throws std::invalid_argument unless f's table matches the admissible
/// depth-word count of spec and every value is finite.
void validate_fn(const SubshiftSpec& spec, const LocallyConstantFn& f);

/// Value of f at any word with at least f.depth symbols (only the prefix
/// matters). Throws when the prefix is inadmissible or the word is too short.
double evaluate(const SubshiftSpec& spec, const LocallyConstantFn& f, const Word& w);

/// Re-expresses f as a function of new_depth >= f.depth coordinates.
LocallyConstantFn lift(const SubshiftSpec& spec, const LocallyConstantFn& f, int new_depth);

/// Sum of two locally constant functions, lifted to the larger depth.
LocallyConstantFn add(const SubshiftSpec& spec, const LocallyConstantFn& f,
                      const LocallyConstantFn& g);

/// Pointwise scalar multiple.
LocallyConstantFn scale(const LocallyConstantFn& f, double c);

/// Parametrized potential family F_theta = f0 + sum_i theta_i f_i.
struct PotentialFamily {
  LocallyConstantFn base;                 // f0
  std::vector<LocallyConstantFn> dirs;    // f1 .. fd

  int dim() const { return static_cast<int>(dirs.size()); }
  int common_depth() const;
};

void validate_family(const SubshiftSpec& spec, const PotentialFamily& fam);

/// F_theta at the family's common depth. theta must have fam.dim() finite
/// entries.
LocallyConstantFn assemble_potential(const SubshiftSpec& spec, const PotentialFamily& fam,
                                     const Eigen::VectorXd& theta);

/// Birkhoff sum sum_{k=0}^{|w|-1} f(sigma^k w), where trailing windows that
/// run off the end of w are completed with the canonical extension (smallest
/// admissible successor at each step).
double birkhoff_sum(const SubshiftSpec& spec, const LocallyConstantFn& f, const Word& w);

}  // namespace gibbsfit
