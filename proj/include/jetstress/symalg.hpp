#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>

#include "jetstress/multiindex.hpp"

namespace jetstress {

/// Which basis a symmetric component array is expressed in.
///
/// `derivative` components are raw partial derivatives w_{,I}: coefficients
/// on the symmetric basis d_I. `dual` components are coefficients on the
/// modified dual basis (|I|!/I!) dx^{i1} (.) ... (.) dx^{il}, so that a dual
/// array pairs with a derivative array by a plain sum over canonical indices.
/// Converting a dual array to the full (all index sequences) tensor array
/// divides each entry by |I|!/I!.
enum class Convention { derivative, dual };

const char* to_string(Convention convention);

/// Fully symmetric degree-l array over n base indices, one value per
/// canonical multi-index in enumerate(n, l) order.
struct SymArray {
  int n = 1;
  int l = 0;
  Convention convention = Convention::derivative;
  Eigen::VectorXd values;

  SymArray() = default;
  SymArray(int n, int l, Convention convention);
  SymArray(int n, int l, Convention convention, Eigen::VectorXd values);

  double operator()(const MultiIndex& index) const;
  double& operator()(const MultiIndex& index);
  /// Value at an arbitrary (unordered) 0-based index sequence.
  double at_sequence(std::span<const int> sequence) const;
};

/// Array of total degree l >= 1 that is symmetric in its first l - 1 slots
/// only. Row = rank of J in enumerate(n, l - 1), column = last index j.
struct AlmostSymArray {
  int n = 1;
  int l = 1;
  Eigen::MatrixXd values;

  AlmostSymArray() = default;
  AlmostSymArray(int n, int l);
  AlmostSymArray(int n, int l, Eigen::MatrixXd values);

  double operator()(const MultiIndex& head, int j) const;
  double& operator()(const MultiIndex& head, int j);
  double at_sequence(std::span<const int> sequence) const;
};

using RawArray = std::function<double(std::span<const int>)>;

/// (1/l!) sum over all permutations of the raw array, evaluated on canonical
/// indices. The result carries `convention` unchanged.
SymArray symmetrize(const RawArray& raw, int n, int l,
                    Convention convention = Convention::derivative);

/// Symmetrization of an almost symmetric array using only the l permutations
/// that move the last slot: S(T)_I = (1/l) sum_j I_j T^{(I - j); j}.
SymArray symmetrize_almost(const AlmostSymArray& t,
                           Convention convention = Convention::derivative);

/// Sum over the pairs (J, j) that reorder to I: result_I = sum_{j in I}
/// T^{(I - j); j}. Valid for arbitrary (non-symmetric) T. The result is in the
/// dual convention; for the spread of a symmetric array R it returns R, and
/// for the symmetric extension of R it returns c(I) R_I.
SymArray collapse_last(const AlmostSymArray& t);

/// Inverse of collapse_last on symmetric data: T^{J; j} = R_{Jj} / c(Jj).
AlmostSymArray spread_last(const SymArray& r);

/// Symmetric extension: T^{J; j} = R_{<Jj>}.
AlmostSymArray extend_symmetric(const SymArray& r);

/// Plain canonical sum of a dual array against a derivative array. Throws
/// std::invalid_argument on shape or convention mismatch.
double pair(const SymArray& dual_side, const SymArray& jet_side);

}  // namespace jetstress
