#include "jetstress/multiindex.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace jetstress {

MultiIndex::MultiIndex(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0) throw std::invalid_argument("multi-index counts must be non-negative");
  }
}

MultiIndex MultiIndex::from_sequence(int n, std::span<const int> sequence) {
  MultiIndex index(n);
  for (int j : sequence) index = append(index, j);
  return index;
}

std::vector<int> MultiIndex::sequence() const {
  std::vector<int> seq;
  for (int r = 0; r < dimension(); ++r) {
    for (int c = 0; c < counts_[static_cast<std::size_t>(r)]; ++c) seq.push_back(r);
  }
  return seq;
}

std::ostream& operator<<(std::ostream& os, const MultiIndex& index) {
  os << '[';
  for (int r = 0; r < index.dimension(); ++r) {
    if (r) os << ',';
    os << index[r];
  }
  return os << ']';
}

int degree(const MultiIndex& index) {
  return std::accumulate(index.counts().begin(), index.counts().end(), 0);
}

std::int64_t factorial(const MultiIndex& index) {
  std::int64_t result = 1;
  for (int c : index.counts()) {
    for (int f = 2; f <= c; ++f) result *= f;
  }
  return result;
}

std::int64_t multiplicity(const MultiIndex& index) {
  // Product of binomials avoids forming |I|! directly.
  std::int64_t result = 1;
  int running = 0;
  for (int c : index.counts()) {
    running += c;
    result *= binomial(running, c);
  }
  return result;
}

int distinct_count(const MultiIndex& index) {
  int count = 0;
  for (int c : index.counts()) count += c > 0;
  return count;
}

namespace {
void check_base_index(const MultiIndex& index, int j) {
  if (j < 0 || j >= index.dimension()) {
    throw std::out_of_range("base index " + std::to_string(j) + " outside [0, " +
                            std::to_string(index.dimension()) + ")");
  }
}
}  // namespace

MultiIndex append(const MultiIndex& index, int j) {
  check_base_index(index, j);
  std::vector<int> counts = index.counts();
  ++counts[static_cast<std::size_t>(j)];
  return MultiIndex(std::move(counts));
}

MultiIndex remove(const MultiIndex& index, int j) {
  check_base_index(index, j);
  if (index[j] == 0) {
    throw std::invalid_argument("base index " + std::to_string(j) +
                                " does not occur in the multi-index");
  }
  std::vector<int> counts = index.counts();
  --counts[static_cast<std::size_t>(j)];
  return MultiIndex(std::move(counts));
}

namespace {
// Fills counts[pos..] with every split of `remaining`, largest leading count
// first, which yields descending lexicographic order.
void enumerate_into(std::vector<int>& counts, std::size_t pos, int remaining,
                    std::vector<MultiIndex>& out) {
  if (pos + 1 == counts.size()) {
    counts[pos] = remaining;
    out.emplace_back(counts);
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    counts[pos] = c;
    enumerate_into(counts, pos + 1, remaining - c, out);
  }
}
}  // namespace

std::vector<MultiIndex> enumerate(int n, int l) {
  if (n < 1) throw std::invalid_argument("enumerate requires n >= 1");
  if (l < 0) throw std::invalid_argument("enumerate requires l >= 0");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(symmetric_dimension(n, l)));
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  enumerate_into(counts, 0, l, out);
  return out;
}

std::vector<MultiIndex> enumerate_up_to(int n, int max_degree) {
  std::vector<MultiIndex> out;
  for (int l = 0; l <= max_degree; ++l) {
    auto block = enumerate(n, l);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

int symmetric_dimension(int n, int l) {
  if (l < 0) return 0;
  if (n == 0) return l == 0 ? 1 : 0;
  return static_cast<int>(binomial(n + l - 1, l));
}

int graded_dimension(int n, int max_degree) {
  if (max_degree < 0) return 0;
  return static_cast<int>(binomial(n + max_degree, n));
}

int rank_in_degree(const MultiIndex& index) {
  // Count the indices of equal degree that precede this one: those whose
  // count vector is lexicographically greater.
  int n = index.dimension();
  int remaining = degree(index);
  int rank = 0;
  for (int r = 0; r + 1 < n; ++r) {
    int c = index[r];
    for (int a = c + 1; a <= remaining; ++a) {
      rank += symmetric_dimension(n - r - 1, remaining - a);
    }
    remaining -= c;
  }
  return rank;
}

int graded_rank(const MultiIndex& index) {
  return graded_dimension(index.dimension(), degree(index) - 1) + rank_in_degree(index);
}

}  // namespace jetstress
