#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <vector>

namespace jetstress {

/// A symmetric multi-index over n base indices, stored as its count vector.
///
/// counts()[r] is the number of occurrences of base index r. Base indices are
/// 0-based throughout the C++ API: the mathematical index r = 1..n maps to
/// offset r - 1. JSON and CSV files use the count vector, which carries no
/// offset, so serialized indices are unaffected by the choice.
///
/// Canonical order (used by enumerate() and every flattened array in the
/// library) is graded: lower degree first, and within a degree the count
/// vectors are sorted in descending lexicographic order. This is the same as
/// ascending lexicographic order of the non-decreasing index sequences, e.g.
/// for n = 2, degree 2: (2,0) (1,1) (0,2), i.e. 11, 12, 22.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int n) : counts_(static_cast<std::size_t>(n), 0) {}
  explicit MultiIndex(std::vector<int> counts);
  MultiIndex(std::initializer_list<int> counts)
      : MultiIndex(std::vector<int>(counts)) {}

  /// Builds the index from an arbitrary (unordered) sequence of 0-based base
  /// indices; any permutation of the sequence gives the same MultiIndex.
  static MultiIndex from_sequence(int n, std::span<const int> sequence);

  int dimension() const { return static_cast<int>(counts_.size()); }
  const std::vector<int>& counts() const { return counts_; }
  int operator[](int r) const { return counts_[static_cast<std::size_t>(r)]; }

  /// Non-decreasing 0-based sequence representative.
  std::vector<int> sequence() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> counts_;
};

std::ostream& operator<<(std::ostream& os, const MultiIndex& index);

int degree(const MultiIndex& index);

/// I! = I_1! ... I_n!
std::int64_t factorial(const MultiIndex& index);

/// |I|! / I!, the number of distinct orderings of the index sequence.
std::int64_t multiplicity(const MultiIndex& index);

/// Number of base indices that occur at least once.
int distinct_count(const MultiIndex& index);

/// Adds one occurrence of base index j. Throws std::out_of_range for j outside
/// [0, n).
MultiIndex append(const MultiIndex& index, int j);

/// Removes one occurrence of base index j. Throws std::out_of_range for j
/// outside [0, n) and std::invalid_argument if j does not occur in the index.
MultiIndex remove(const MultiIndex& index, int j);

/// All multi-indices of degree l over n base indices, in canonical order.
/// The length is (n+l-1)! / ((n-1)! l!).
std::vector<MultiIndex> enumerate(int n, int l);

/// All multi-indices with degree <= max_degree, in canonical (graded) order.
std::vector<MultiIndex> enumerate_up_to(int n, int max_degree);

std::int64_t binomial(int n, int k);

/// (n+l-1)! / ((n-1)! l!): the number of multi-indices of degree l.
int symmetric_dimension(int n, int l);

/// Number of multi-indices of degree <= max_degree, i.e. C(n + d, n).
int graded_dimension(int n, int max_degree);

/// Position of the index inside enumerate(n, degree(index)).
int rank_in_degree(const MultiIndex& index);

/// Position of the index inside enumerate_up_to(n, d) for any d >= degree.
int graded_rank(const MultiIndex& index);

}  // namespace jetstress
