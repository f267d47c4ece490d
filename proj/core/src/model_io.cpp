#include "gibbsfit/model_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace gibbsfit {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw std::runtime_error(origin + ": " + what);
}

std::vector<std::string> tokenize(std::istream& in) {
  std::vector<std::string> toks;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) toks.push_back(t);
  }
  return toks;
}

class TokenCursor {
 public:
  TokenCursor(std::vector<std::string> toks, std::string origin)
      : toks_(std::move(toks)), origin_(std::move(origin)) {}

  bool done() const { return pos_ >= toks_.size(); }
  const std::string& peek() const { return toks_[pos_]; }
  std::string take() { return toks_[pos_++]; }

  std::string expect_word(const std::string& context) {
    if (done()) fail(origin_, "unexpected end of file, expected " + context);
    return take();
  }

  long expect_int(const std::string& context) {
    const std::string t = expect_word(context);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) fail(origin_, "expected integer for " + context + ", got '" + t + "'");
    return v;
  }

  double expect_double(const std::string& context) {
    const std::string t = expect_word(context);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != t.size()) fail(origin_, "expected number for " + context + ", got '" + t + "'");
    return v;
  }

  /// True when the next token parses entirely as a number.
  bool next_is_number() const {
    if (done()) return false;
    const std::string& t = peek();
    std::size_t used = 0;
    try {
      (void)std::stod(t, &used);
    } catch (const std::exception&) {
      return false;
    }
    return used == t.size();
  }

  std::vector<double> take_numbers() {
    std::vector<double> out;
    while (next_is_number()) out.push_back(expect_double("numeric list"));
    return out;
  }

  const std::string& origin() const { return origin_; }

 private:
  std::vector<std::string> toks_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ModelFile parse_model(std::istream& in, const std::string& origin) {
  TokenCursor cur(tokenize(in), origin);

  if (cur.done() || cur.peek() != "alphabet")
    fail(origin, "model file must start with an 'alphabet' directive");
  cur.take();
  const long a = cur.expect_int("alphabet size");
  if (a < 2 || a > 64) fail(origin, "alphabet size must be in [2, 64]");

  Eigen::MatrixXi inc = Eigen::MatrixXi::Ones(a, a);
  bool saw_incidence = false;
  std::optional<LocallyConstantFn> base;
  std::vector<LocallyConstantFn> dirs;
  std::vector<double> box_lo, box_hi, theta;

  // Potential table lengths require the final incidence matrix, so the spec
  // is pinned down at the first potential block.
  std::optional<SubshiftSpec> spec;
  auto pin_spec = [&]() -> const SubshiftSpec& {
    if (!spec) {
      try {
        spec.emplace(static_cast<int>(a), inc);
      } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
      }
    }
    return *spec;
  };

  while (!cur.done()) {
    const std::string key = cur.take();
    if (key == "incidence") {
      if (saw_incidence) fail(origin, "duplicate incidence block");
      if (spec) fail(origin, "incidence must precede all potential blocks");
      saw_incidence = true;
      for (long i = 0; i < a; ++i)
        for (long j = 0; j < a; ++j) {
          const long v = cur.expect_int("incidence entry");
          if (v != 0 && v != 1) fail(origin, "incidence entries must be 0 or 1");
          inc(i, j) = static_cast<int>(v);
        }
    } else if (key == "potential") {
      const std::string kind = cur.expect_word("'base' or 'dir'");
      if (kind != "base" && kind != "dir") fail(origin, "potential kind must be 'base' or 'dir'");
      const std::string depth_kw = cur.expect_word("'depth'");
      if (depth_kw != "depth") fail(origin, "expected 'depth' after potential kind");
      const long depth = cur.expect_int("potential depth");
      if (depth < 1 || depth > 12) fail(origin, "potential depth must be in [1, 12]");
      const SubshiftSpec& s = pin_spec();
      const std::size_t need = enumerate_admissible_words(s, static_cast<int>(depth)).size();
      std::vector<double> vals;
      vals.reserve(need);
      for (std::size_t k = 0; k < need; ++k) vals.push_back(cur.expect_double("potential value"));
      LocallyConstantFn f(static_cast<int>(depth), std::move(vals));
      try {
        validate_fn(s, f);
      } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
      }
      if (kind == "base") {
        if (base) fail(origin, "duplicate base potential");
        base = std::move(f);
      } else {
        dirs.push_back(std::move(f));
      }
    } else if (key == "box") {
      const std::string side = cur.expect_word("'lower' or 'upper'");
      std::vector<double>& dst = side == "lower" ? box_lo : box_hi;
      if (side != "lower" && side != "upper") fail(origin, "box side must be 'lower' or 'upper'");
      if (!dst.empty()) fail(origin, "duplicate box " + side + " line");
      dst = cur.take_numbers();
      if (dst.empty()) fail(origin, "box " + side + " needs at least one value");
    } else if (key == "theta") {
      if (!theta.empty()) fail(origin, "duplicate theta line");
      theta = cur.take_numbers();
      if (theta.empty()) fail(origin, "theta needs at least one value");
    } else {
      fail(origin, "unknown directive '" + key + "'");
    }
  }

  if (dirs.empty()) fail(origin, "model declares no 'potential dir' block");
  const SubshiftSpec& s = pin_spec();

  PotentialFamily fam;
  if (base) {
    fam.base = std::move(*base);
  } else {
    fam.base = LocallyConstantFn(1, std::vector<double>(static_cast<std::size_t>(a), 0.0));
    validate_fn(s, fam.base);
  }
  fam.dirs = std::move(dirs);
  try {
    validate_family(s, fam);
  } catch (const std::invalid_argument& e) {
    fail(origin, e.what());
  }
  const std::size_t d = fam.dirs.size();

  if (box_lo.empty() != box_hi.empty())
    fail(origin, "box lower and box upper must appear together");
  if (!box_lo.empty()) {
    if (box_lo.size() != d || box_hi.size() != d)
      fail(origin, "box lines must carry one value per direction");
    for (std::size_t i = 0; i < d; ++i)
      if (!(box_lo[i] < box_hi[i])) fail(origin, "box lower must be strictly below box upper");
  }
  if (!theta.empty() && theta.size() != d)
    fail(origin, "theta must carry one value per direction");

  auto to_vec = [](const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  return ModelFile{s, std::move(fam), to_vec(box_lo), to_vec(box_hi), to_vec(theta)};
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open model file");
  return parse_model(in, path);
}

void write_model(std::ostream& out, const ModelFile& model) {
  const int a = model.spec.alphabet_size();
  out << "alphabet " << a << "\n";
  if (model.spec.incidence() != Eigen::MatrixXi::Ones(a, a)) {
    out << "incidence\n";
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < a; ++j) out << (j ? " " : "") << model.spec.incidence()(i, j);
      out << "\n";
    }
  }
  auto write_table = [&](const char* kind, const LocallyConstantFn& f) {
    out << "potential " << kind << " depth " << f.depth << "\n";
    for (std::size_t k = 0; k < f.values.size(); ++k)
      out << (k ? " " : "") << fmt(f.values[k]);
    out << "\n";
  };
  write_table("base", model.family.base);
  for (const LocallyConstantFn& f : model.family.dirs) write_table("dir", f);
  auto write_line = [&](const char* key, const Eigen::VectorXd& v) {
    out << key;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << " " << fmt(v[i]);
    out << "\n";
  };
  if (model.has_box()) {
    write_line("box lower", model.box_lower);
    write_line("box upper", model.box_upper);
  }
  if (model.has_theta()) write_line("theta", model.theta);
}

void save_model(const std::string& path, const ModelFile& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_model(out, model);
  if (!out) throw std::runtime_error(path + ": write failed");
}

Word parse_sample(std::istream& in, const std::string& origin) {
  TokenCursor cur(tokenize(in), origin);
  std::vector<int> syms;
  while (!cur.done()) {
    const long v = cur.expect_int("sample symbol");
    if (v < 1) fail(origin, "sample symbols are 1-based positive integers");
    syms.push_back(static_cast<int>(v));
  }
  if (syms.empty()) fail(origin, "sample file holds no symbols");
  return Word(std::move(syms));
}

Word load_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open sample file");
  return parse_sample(in, path);
}

void write_sample(std::ostream& out, const Word& w, const std::vector<std::string>& header) {
  for (const std::string& h : header) out << "# " << h << "\n";
  for (int i = 0; i < w.size(); ++i) {
    out << w[i];
    out << (((i + 1) % 40 == 0 || i + 1 == w.size()) ? "\n" : " ");
  }
}

void save_sample(const std::string& path, const Word& w,
                 const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_sample(out, w, header);
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace gibbsfit
