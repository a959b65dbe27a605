#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jetstress/expr.hpp"
#include "jetstress/series.hpp"
#include "jetstress/symalg.hpp"

namespace jetstress {

/// A smooth map R^n_in -> R^n_out evaluated in series arithmetic: given input
/// series (any number of variables, any order) it returns the output series
/// of the composite, exact to the input order. Evaluation is a pure function
/// of its inputs, so a map may be evaluated concurrently from many threads.
class SmoothMap {
 public:
  using Function = std::function<std::vector<Series>(std::span<const Series>)>;

  SmoothMap() = default;
  SmoothMap(int inputs, int outputs, Function fn);

  static SmoothMap from_expressions(int inputs, std::vector<Expr> outputs);
  static SmoothMap constant(int inputs, const Eigen::VectorXd& values);
  static SmoothMap identity(int n);

  int inputs() const { return inputs_; }
  int outputs() const { return outputs_; }

  std::vector<Series> operator()(std::span<const Series> in) const;

  /// Taylor expansion of every output about x, to the given order, in the
  /// displacement variables t = (input - x).
  std::vector<Series> expand(const Eigen::VectorXd& x, int order) const;
  Eigen::VectorXd value(const Eigen::VectorXd& x) const;
  /// Jacobian d out / d in at x.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  /// The expression list when the map was built from expressions.
  const std::optional<std::vector<Expr>>& expressions() const { return expressions_; }

 private:
  int inputs_ = 0;
  int outputs_ = 0;
  Function fn_;
  std::optional<std::vector<Expr>> expressions_;
};

/// A map whose value at a point is computed from the `extra`-jet of `base`
/// at that point. `op` receives the base outputs expanded about the point to
/// order (order + extra) and must return `outputs` series of order >= order.
/// The result is a genuine SmoothMap: it accepts arbitrary input series.
using JetOperator = std::function<std::vector<Series>(std::span<const Series> expanded, int order)>;
SmoothMap differential_map(const SmoothMap& base, int outputs, int extra, JetOperator op);

/// Outputs of a followed by outputs of b.
SmoothMap concatenate(const SmoothMap& a, const SmoothMap& b);

/// Outputs matrix * base(x).
SmoothMap linear_image(const SmoothMap& base, const Eigen::MatrixXd& matrix);

/// Series of `outer` applied to the map `inner`: outer(inner(x)).
SmoothMap chain(const SmoothMap& outer, const SmoothMap& inner);

/// The k-jet of a section w of an m-dimensional vector bundle at a point,
/// in the derivative convention: values(alpha, graded_rank(I)) = w^alpha_{,I}.
struct JetPoint {
  int n = 1;
  int m = 1;
  int order = 0;
  Eigen::MatrixXd values;

  JetPoint() = default;
  JetPoint(int n, int m, int order);
  JetPoint(int n, int m, int order, Eigen::MatrixXd values);

  double operator()(int alpha, const MultiIndex& index) const;
  double& operator()(int alpha, const MultiIndex& index);
  SymArray block(int alpha, int degree) const;
  JetPoint truncated(int order) const;

  int components() const { return static_cast<int>(values.size()); }
  /// alpha-major, then graded multi-index.
  Eigen::VectorXd flatten() const;
  static JetPoint unflatten(int n, int m, int order, const Eigen::VectorXd& flat);
};

/// A point of J^1(J^{k-1}W): values lambda^alpha_J (|J| <= k-1) and first
/// derivatives mu^alpha_{J;j}, symmetric in J only.
struct NonHolJetPoint {
  int n = 1;
  int m = 1;
  int k = 1;
  Eigen::MatrixXd lambda;           // m x graded_dimension(n, k-1)
  std::vector<Eigen::MatrixXd> mu;  // per alpha: graded_dimension(n, k-1) x n

  NonHolJetPoint() = default;
  NonHolJetPoint(int n, int m, int k);

  /// mu restricted to |J| = r, as a degree r+1 almost symmetric array.
  AlmostSymArray mu_block(int alpha, int r) const;

  int components() const;
  /// lambda (alpha-major) followed by mu (alpha, J, j).
  Eigen::VectorXd flatten() const;
  static NonHolJetPoint unflatten(int n, int m, int k, const Eigen::VectorXd& flat);
};

/// j^k w at x for a section w: R^n -> R^m.
JetPoint prolong(const SmoothMap& section, const Eigen::VectorXd& x, int k);

/// The section x -> j^order w(x) of the jet bundle, as a map with
/// m * graded_dimension(n, order) outputs in JetPoint::flatten order.
SmoothMap jet_section(const SmoothMap& section, int order);

/// j^1 of a section lambda of J^{k-1}W given by its m * graded_dimension(n, k-1)
/// component functions (derivative convention).
NonHolJetPoint prolong_section_of_jets(const SmoothMap& lambda, int m, int k,
                                       const Eigen::VectorXd& x);

/// The holonomic inclusion J^k W -> J^1(J^{k-1} W).
NonHolJetPoint include_holonomic(const JetPoint& u);

/// True iff mu depends only on the reordered index <Jj> and agrees with the
/// lambda part one degree up, within tol.
bool is_holonomic(const NonHolJetPoint& p, double tol);

}  // namespace jetstress
