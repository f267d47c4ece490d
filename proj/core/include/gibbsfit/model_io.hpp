#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "gibbsfit/potential.hpp"
#include "gibbsfit/subshift.hpp"

namespace gibbsfit {

/// In-memory form of a model definition file.
///
/// The file is structured text: whitespace-separated tokens, `#` starts a
/// comment running to end of line, numeric lists may wrap across lines.
///
///   alphabet 2              required, first directive
///   incidence               optional (full shift when absent), a*a entries
///   0 1                     row-major, one row per alphabet symbol
///   1 1
///   potential base depth 1  optional (zero at depth 1 when absent)
///   0 0
///   potential dir depth 2   one block per direction, in direction order;
///   1 0 0                   one value per admissible depth-word, lexicographic
///   box lower -5            optional, both lines or neither, d values each
///   box upper 5
///   theta 0.25              optional default parameter vector, d values
struct ModelFile {
  SubshiftSpec spec;
  PotentialFamily family;
  Eigen::VectorXd box_lower;  // size 0 when the file declares no box
  Eigen::VectorXd box_upper;
  Eigen::VectorXd theta;      // size 0 when the file declares no theta

  bool has_box() const { return box_lower.size() > 0; }
  bool has_theta() const { return theta.size() > 0; }
};

ModelFile parse_model(std::istream& in, const std::string& origin = "<stream>");
ModelFile load_model(const std::string& path);

void write_model(std::ostream& out, const ModelFile& model);
void save_model(const std::string& path, const ModelFile& model);

/// Reads a sample path: 1-based symbols, whitespace separated, `#` comments
/// ignored. Admissibility against a particular shift is the caller's check.
Word parse_sample(std::istream& in, const std::string& origin = "<stream>");
Word load_sample(const std::string& path);

/// Writes one sample path; `header` lines are emitted first as `# ` comments.
void write_sample(std::ostream& out, const Word& w,
                  const std::vector<std::string>& header = {});
void save_sample(const std::string& path, const Word& w,
                 const std::vector<std::string>& header = {});

}  // namespace gibbsfit
