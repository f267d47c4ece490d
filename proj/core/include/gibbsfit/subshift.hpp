#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace gibbsfit {

/// A finite word over the alphabet {1, ..., a}. Symbols are 1-based in the
/// whole public interface; translation to array indices happens inside
/// WordSpace and nowhere else.
struct Word {
  std::vector<int> syms;

  Word() = default;
  explicit Word(std::vector<int> s) : syms(std::move(s)) {}

  int size() const { return static_cast<int>(syms.size()); }
  bool empty() const { return syms.empty(); }
  int operator[](int i) const { return syms[static_cast<std::size_t>(i)]; }
  int back() const { return syms.back(); }

  Word prefix(int k) const;
  Word suffix(int k) const;
  Word appended(int s) const;
  Word concat(const Word& other) const;

  /// Space-separated symbols, e.g. "1 2 1".
  std::string str() const;

  bool operator==(const Word& other) const = default;
};

/// A topologically mixing subshift of finite type. Holds the alphabet size
/// and the 0/1 incidence matrix; entry (i-1, j-1) nonzero means symbol j may
/// follow symbol i. The constructor rejects non-primitive incidence matrices,
/// so downstream code may assume a spectral gap exists.
class SubshiftSpec {
 public:
  SubshiftSpec(int alphabet_size, Eigen::MatrixXi incidence);

  int alphabet_size() const { return a_; }
  const Eigen::MatrixXi& incidence() const { return inc_; }

  /// May symbol j follow symbol i? Both 1-based.
  bool allowed(int i, int j) const { return inc_(i - 1, j - 1) != 0; }

  /// True when every symbol lies in {1..a} and consecutive pairs are allowed.
  bool admissible(const Word& w) const;

  /// Appends `extra` symbols, each time the smallest admissible successor.
  Word canonical_extension(const Word& w, int extra) const;

  bool operator==(const SubshiftSpec& other) const;

 private:
  int a_;
  Eigen::MatrixXi inc_;
};

SubshiftSpec full_shift(int alphabet_size);

/// Two symbols with the pair "1 1" forbidden.
SubshiftSpec golden_mean_shift();

/// True when some power of the boolean matrix is strictly positive. The
/// check squares the matrix until the exponent passes the Wielandt bound
/// n^2 - 2n + 2, which is decisive either way.
bool is_primitive(const Eigen::MatrixXi& incidence);

/// All admissible words of length n in lexicographic order.
std::vector<Word> enumerate_admissible_words(const SubshiftSpec& spec, int n);

/// The admissible words of one fixed length with O(1) index lookup and the
/// successor structure v = (shift u) . s used by transfer matrices, chains
/// and samplers. Enumeration order is lexicographic.
class WordSpace {
 public:
  WordSpace(const SubshiftSpec& spec, int length);

  int length() const { return len_; }
  int size() const { return static_cast<int>(words_.size()); }
  const Word& word(int idx) const { return words_[static_cast<std::size_t>(idx)]; }
  const std::vector<Word>& words() const { return words_; }

  /// Index of w in enumeration order, or -1 when w is not an admissible word
  /// of this length.
  int index(const Word& w) const;

  /// Same, but throws std::invalid_argument instead of returning -1.
  int index_checked(const Word& w) const;

  /// Indices j such that word(j) == (shift of word(i)) . s for some symbol s.
  const std::vector<int>& successors(int idx) const {
    return succ_[static_cast<std::size_t>(idx)];
  }

 private:
  int len_;
  int a_;
  std::vector<Word> words_;
  std::vector<std::vector<int>> succ_;
  // Dense lookup keyed by the base-a digit expansion when it fits, hash map
  // otherwise (long words over big alphabets).
  std::vector<int> dense_;
  std::unordered_map<std::uint64_t, int> sparse_;
  bool use_dense_ = true;

  std::uint64_t key_of(const Word& w) const;
};

}  // namespace gibbsfit
