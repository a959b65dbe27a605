#include "jetstress/symalg.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace jetstress {

const char* to_string(Convention convention) {
  return convention == Convention::dual ? "dual" : "derivative";
}

SymArray::SymArray(int n_, int l_, Convention convention_)
    : n(n_), l(l_), convention(convention_),
      values(Eigen::VectorXd::Zero(symmetric_dimension(n_, l_))) {}

SymArray::SymArray(int n_, int l_, Convention convention_, Eigen::VectorXd values_)
    : n(n_), l(l_), convention(convention_), values(std::move(values_)) {
  if (values.size() != symmetric_dimension(n, l)) {
    throw std::invalid_argument("SymArray: wrong number of values");
  }
}

double SymArray::operator()(const MultiIndex& index) const {
  return values(rank_in_degree(index));
}

double& SymArray::operator()(const MultiIndex& index) {
  return values(rank_in_degree(index));
}

double SymArray::at_sequence(std::span<const int> sequence) const {
  return (*this)(MultiIndex::from_sequence(n, sequence));
}

AlmostSymArray::AlmostSymArray(int n_, int l_)
    : n(n_), l(l_), values(Eigen::MatrixXd::Zero(symmetric_dimension(n_, l_ - 1), n_)) {
  if (l < 1) throw std::invalid_argument("AlmostSymArray requires l >= 1");
}

AlmostSymArray::AlmostSymArray(int n_, int l_, Eigen::MatrixXd values_)
    : n(n_), l(l_), values(std::move(values_)) {
  if (l < 1) throw std::invalid_argument("AlmostSymArray requires l >= 1");
  if (values.rows() != symmetric_dimension(n, l - 1) || values.cols() != n) {
    throw std::invalid_argument("AlmostSymArray: wrong value shape");
  }
}

double AlmostSymArray::operator()(const MultiIndex& head, int j) const {
  return values(rank_in_degree(head), j);
}

double& AlmostSymArray::operator()(const MultiIndex& head, int j) {
  return values(rank_in_degree(head), j);
}

double AlmostSymArray::at_sequence(std::span<const int> sequence) const {
  if (static_cast<int>(sequence.size()) != l) {
    throw std::invalid_argument("AlmostSymArray: sequence length differs from degree");
  }
  auto head = MultiIndex::from_sequence(n, sequence.first(sequence.size() - 1));
  return (*this)(head, sequence.back());
}

SymArray symmetrize(const RawArray& raw, int n, int l, Convention convention) {
  SymArray out(n, l, convention);
  const auto indices = enumerate(n, l);
  std::vector<int> perm(static_cast<std::size_t>(l));
  std::vector<int> permuted(static_cast<std::size_t>(l));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto seq = indices[r].sequence();
    std::iota(perm.begin(), perm.end(), 0);
    double sum = 0.0;
    long count = 0;
    do {
      for (std::size_t s = 0; s < perm.size(); ++s) {
        permuted[s] = seq[static_cast<std::size_t>(perm[s])];
      }
      sum += raw(permuted);
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.values(static_cast<Eigen::Index>(r)) = sum / static_cast<double>(count);
  }
  return out;
}

SymArray symmetrize_almost(const AlmostSymArray& t, Convention convention) {
  SymArray out(t.n, t.l, convention);
  const auto indices = enumerate(t.n, t.l);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    double sum = 0.0;
    for (int j = 0; j < t.n; ++j) {
      if (indices[r][j] == 0) continue;
      sum += indices[r][j] * t(remove(indices[r], j), j);
    }
    out.values(static_cast<Eigen::Index>(r)) = sum / t.l;
  }
  return out;
}

SymArray collapse_last(const AlmostSymArray& t) {
  SymArray out(t.n, t.l, Convention::dual);
  const auto indices = enumerate(t.n, t.l);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    double sum = 0.0;
    for (int j = 0; j < t.n; ++j) {
      if (indices[r][j] > 0) sum += t(remove(indices[r], j), j);
    }
    out.values(static_cast<Eigen::Index>(r)) = sum;
  }
  return out;
}

AlmostSymArray spread_last(const SymArray& r) {
  if (r.l < 1) throw std::invalid_argument("spread_last requires degree >= 1");
  AlmostSymArray out(r.n, r.l);
  for (const auto& head : enumerate(r.n, r.l - 1)) {
    for (int j = 0; j < r.n; ++j) {
      const auto full = append(head, j);
      out(head, j) = r(full) / distinct_count(full);
    }
  }
  return out;
}

AlmostSymArray extend_symmetric(const SymArray& r) {
  if (r.l < 1) throw std::invalid_argument("extend_symmetric requires degree >= 1");
  AlmostSymArray out(r.n, r.l);
  for (const auto& head : enumerate(r.n, r.l - 1)) {
    for (int j = 0; j < r.n; ++j) out(head, j) = r(append(head, j));
  }
  return out;
}

double pair(const SymArray& dual_side, const SymArray& jet_side) {
  if (dual_side.n != jet_side.n || dual_side.l != jet_side.l) {
    throw std::invalid_argument("pair: dimension or degree mismatch");
  }
  if (dual_side.convention != Convention::dual ||
      jet_side.convention != Convention::derivative) {
    throw std::invalid_argument("pair: expects (dual, derivative) convention arrays");
  }
  return dual_side.values.dot(jet_side.values);
}

}  // namespace jetstress
