#include "gibbsfit/subshift.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gibbsfit {

Word Word::prefix(int k) const {
  if (k < 0 || k > size()) throw std::invalid_argument("Word::prefix: bad length");
  return Word(std::vector<int>(syms.begin(), syms.begin() + k));
}

Word Word::suffix(int k) const {
  if (k < 0 || k > size()) throw std::invalid_argument("Word::suffix: bad length");
  return Word(std::vector<int>(syms.end() - k, syms.end()));
}

Word Word::appended(int s) const {
  Word out = *this;
  out.syms.push_back(s);
  return out;
}

Word Word::concat(const Word& other) const {
  Word out = *this;
  out.syms.insert(out.syms.end(), other.syms.begin(), other.syms.end());
  return out;
}

std::string Word::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < syms.size(); ++i) {
    if (i) os << ' ';
    os << syms[i];
  }
  return os.str();
}

bool is_primitive(const Eigen::MatrixXi& incidence) {
  const int n = static_cast<int>(incidence.rows());
  if (n == 0 || incidence.cols() != n) return false;
  // Boolean squaring: B^(2^k) stays {0,1}-valued, and once the exponent
  // passes the Wielandt bound a primitive matrix must be strictly positive.
  const long bound = static_cast<long>(n) * n - 2L * n + 2L;
  Eigen::MatrixXi b = (incidence.array() != 0).cast<int>();
  long exponent = 1;
  while (exponent < bound) {
    b = (b * b).unaryExpr([](int x) { return x != 0 ? 1 : 0; }).eval();
    exponent *= 2;
  }
  return (b.array() > 0).all();
}

SubshiftSpec::SubshiftSpec(int alphabet_size, Eigen::MatrixXi incidence)
    : a_(alphabet_size), inc_(std::move(incidence)) {
  if (a_ < 2) throw std::invalid_argument("SubshiftSpec: alphabet size must be at least 2");
  if (inc_.rows() != a_ || inc_.cols() != a_)
    throw std::invalid_argument("SubshiftSpec: incidence matrix must be a x a");
  for (int i = 0; i < a_; ++i)
    for (int j = 0; j < a_; ++j)
      if (inc_(i, j) != 0 && inc_(i, j) != 1)
        throw std::invalid_argument("SubshiftSpec: incidence entries must be 0 or 1");
  if (!is_primitive(inc_))
    throw std::invalid_argument(
        "SubshiftSpec: incidence matrix is not primitive (shift not mixing)");
}

bool SubshiftSpec::admissible(const Word& w) const {
  for (int i = 0; i < w.size(); ++i) {
    if (w[i] < 1 || w[i] > a_) return false;
    if (i > 0 && !allowed(w[i - 1], w[i])) return false;
  }
  return true;
}

Word SubshiftSpec::canonical_extension(const Word& w, int extra) const {
  if (w.empty() && extra > 0)
    throw std::invalid_argument("canonical_extension: empty word has no last symbol");
  Word out = w;
  for (int k = 0; k < extra; ++k) {
    int last = out.back();
    int next = 0;
    for (int s = 1; s <= a_; ++s) {
      if (allowed(last, s)) {
        next = s;
        break;
      }
    }
    // A primitive incidence matrix has no zero row, so a successor exists.
    out.syms.push_back(next);
  }
  return out;
}

bool SubshiftSpec::operator==(const SubshiftSpec& other) const {
  return a_ == other.a_ && inc_ == other.inc_;
}

SubshiftSpec full_shift(int alphabet_size) {
  return SubshiftSpec(alphabet_size,
                      Eigen::MatrixXi::Ones(alphabet_size, alphabet_size));
}

SubshiftSpec golden_mean_shift() {
  Eigen::MatrixXi inc(2, 2);
  inc << 0, 1, 1, 1;
  return SubshiftSpec(2, std::move(inc));
}

std::vector<Word> enumerate_admissible_words(const SubshiftSpec& spec, int n) {
  if (n < 1) throw std::invalid_argument("enumerate_admissible_words: length must be positive");
  std::vector<Word> cur;
  cur.reserve(static_cast<std::size_t>(spec.alphabet_size()));
  for (int s = 1; s <= spec.alphabet_size(); ++s) cur.push_back(Word({s}));
  for (int len = 2; len <= n; ++len) {
    std::vector<Word> next;
    next.reserve(cur.size() * static_cast<std::size_t>(spec.alphabet_size()));
    for (const Word& w : cur)
      for (int s = 1; s <= spec.alphabet_size(); ++s)
        if (spec.allowed(w.back(), s)) next.push_back(w.appended(s));
    cur = std::move(next);
  }
  return cur;
}

WordSpace::WordSpace(const SubshiftSpec& spec, int length)
    : len_(length), a_(spec.alphabet_size()) {
  words_ = enumerate_admissible_words(spec, length);
  if (words_.empty())
    throw std::runtime_error("WordSpace: no admissible words of requested length");

  double dense_size = 1.0;
  for (int i = 0; i < len_; ++i) dense_size *= a_;
  use_dense_ = dense_size <= static_cast<double>(1 << 22);
  if (use_dense_) {
    dense_.assign(static_cast<std::size_t>(dense_size), -1);
    for (int i = 0; i < size(); ++i) dense_[key_of(words_[static_cast<std::size_t>(i)])] = i;
  } else {
    sparse_.reserve(words_.size() * 2);
    for (int i = 0; i < size(); ++i) sparse_[key_of(words_[static_cast<std::size_t>(i)])] = i;
  }

  succ_.resize(words_.size());
  for (int i = 0; i < size(); ++i) {
    const Word shifted = words_[static_cast<std::size_t>(i)].suffix(len_ - 1);
    for (int s = 1; s <= a_; ++s) {
      Word cand = shifted.appended(s);
      int j = index(cand);
      if (j >= 0) succ_[static_cast<std::size_t>(i)].push_back(j);
    }
  }
}

std::uint64_t WordSpace::key_of(const Word& w) const {
  std::uint64_t key = 0;
  for (int i = 0; i < w.size(); ++i)
    key = key * static_cast<std::uint64_t>(a_) + static_cast<std::uint64_t>(w[i] - 1);
  return key;
}

int WordSpace::index(const Word& w) const {
  if (w.size() != len_) return -1;
  for (int i = 0; i < w.size(); ++i)
    if (w[i] < 1 || w[i] > a_) return -1;
  const std::uint64_t key = key_of(w);
  if (use_dense_) {
    return dense_[key];
  }
  auto it = sparse_.find(key);
  return it == sparse_.end() ? -1 : it->second;
}

int WordSpace::index_checked(const Word& w) const {
  int idx = index(w);
  if (idx < 0)
    throw std::invalid_argument("WordSpace: word '" + w.str() +
                                "' is not an admissible word of length " +
                                std::to_string(len_));
  return idx;
}

}  // namespace gibbsfit
