#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "jetstress/multiindex.hpp"

namespace jetstress {

/// Coefficient layout shared by every truncated series with the same number
/// of variables and order: the graded multi-index basis, the truncated Cauchy
/// product table and the derivative shift table. Layouts are immutable and
/// cached, so they may be shared freely between threads.
class SeriesLayout {
 public:
  static std::shared_ptr<const SeriesLayout> get(int variables, int order);

  int variables() const { return variables_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(basis_.size()); }
  const std::vector<MultiIndex>& basis() const { return basis_; }
  int degree_of(int i) const { return degrees_[static_cast<std::size_t>(i)]; }

  /// Product triples (a, b, c): coefficient c of a product receives a_i * b_j.
  struct ProductTerm {
    std::int32_t a, b, c;
  };
  const std::vector<ProductTerm>& products() const { return products_; }

  /// For variable j: pairs (source, factor) such that coefficient i of the
  /// j-th partial derivative (in the order - 1 layout) is factor * source.
  struct ShiftTerm {
    std::int32_t source;
    double factor;
  };
  const std::vector<ShiftTerm>& shift(int j) const {
    return shifts_[static_cast<std::size_t>(j)];
  }

 private:
  SeriesLayout(int variables, int order);

  int variables_;
  int order_;
  std::vector<MultiIndex> basis_;
  std::vector<int> degrees_;
  std::vector<ProductTerm> products_;
  std::vector<std::vector<ShiftTerm>> shifts_;
};

/// Multivariate Taylor polynomial truncated at a fixed total order: the
/// coefficients of sum_I c_I t^I for |I| <= order, with t the displacement
/// from the expansion point. Arithmetic is exact modulo terms of degree
/// order + 1, which makes it a forward-mode differentiation engine of any
/// order: the partial derivative d_I at the expansion point is I! c_I.
template <typename Scalar>
class TruncatedSeries {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TruncatedSeries() = default;
  TruncatedSeries(std::shared_ptr<const SeriesLayout> layout, Vector coeffs)
      : layout_(std::move(layout)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != layout_->size()) {
      throw std::invalid_argument("TruncatedSeries: coefficient count mismatch");
    }
  }

  static TruncatedSeries zero(int variables, int order) {
    auto layout = SeriesLayout::get(variables, order);
    return TruncatedSeries(layout, Vector::Zero(layout->size()));
  }
  static TruncatedSeries constant(int variables, int order, Scalar value) {
    auto s = zero(variables, order);
    s.coeffs_(0) = value;
    return s;
  }
  /// value + t_i
  static TruncatedSeries variable(int variables, int order, int i, Scalar value) {
    auto s = constant(variables, order, value);
    if (order >= 1) s.coeffs_(1 + i) = Scalar(1);
    return s;
  }

  int variables() const { return layout_->variables(); }
  int order() const { return layout_->order(); }
  const std::shared_ptr<const SeriesLayout>& layout() const { return layout_; }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }

  Scalar value() const { return coeffs_(0); }
  Scalar coefficient(const MultiIndex& index) const {
    if (degree(index) > order()) return Scalar(0);
    return coeffs_(graded_rank(index));
  }
  /// Partial derivative d_I at the expansion point.
  Scalar partial(const MultiIndex& index) const {
    return static_cast<Scalar>(factorial(index)) * coefficient(index);
  }

  /// The same variables and data re-expressed at a lower order.
  TruncatedSeries truncated(int order) const {
    if (order > this->order()) {
      throw std::invalid_argument("TruncatedSeries::truncated: cannot raise the order");
    }
    auto layout = SeriesLayout::get(variables(), order);
    return TruncatedSeries(layout, coeffs_.head(layout->size()));
  }

  /// d/dt_j; the result has order - 1 (it is exact only to that order).
  TruncatedSeries derivative(int j) const {
    if (order() == 0) return zero(variables(), 0);
    auto layout = SeriesLayout::get(variables(), order() - 1);
    Vector out(layout->size());
    const auto& shift = layout_->shift(j);
    for (int i = 0; i < layout->size(); ++i) {
      const auto& term = shift[static_cast<std::size_t>(i)];
      out(i) = static_cast<Scalar>(term.factor) * coeffs_(term.source);
    }
    return TruncatedSeries(layout, std::move(out));
  }

  TruncatedSeries& operator+=(const TruncatedSeries& other) {
    check_compatible(other);
    coeffs_ += other.coeffs_;
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& other) {
    check_compatible(other);
    coeffs_ -= other.coeffs_;
    return *this;
  }
  TruncatedSeries& operator*=(Scalar factor) {
    coeffs_ *= factor;
    return *this;
  }
  TruncatedSeries& operator+=(Scalar c) {
    coeffs_(0) += c;
    return *this;
  }

  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator+(TruncatedSeries a, Scalar c) { return a += c; }
  friend TruncatedSeries operator+(Scalar c, TruncatedSeries a) { return a += c; }
  friend TruncatedSeries operator-(TruncatedSeries a, Scalar c) { return a += -c; }
  friend TruncatedSeries operator*(TruncatedSeries a, Scalar c) { return a *= c; }
  friend TruncatedSeries operator*(Scalar c, TruncatedSeries a) { return a *= c; }
  friend TruncatedSeries operator-(TruncatedSeries a) {
    a.coeffs_ = -a.coeffs_;
    return a;
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_compatible(b);
    Vector out = Vector::Zero(a.coeffs_.size());
    for (const auto& term : a.layout_->products()) {
      out(term.c) += a.coeffs_(term.a) * b.coeffs_(term.b);
    }
    return TruncatedSeries(a.layout_, std::move(out));
  }
  TruncatedSeries& operator*=(const TruncatedSeries& other) { return *this = *this * other; }

  /// The series without its constant term.
  TruncatedSeries displacement() const {
    TruncatedSeries h = *this;
    h.coeffs_(0) = Scalar(0);
    return h;
  }

 private:
  void check_compatible(const TruncatedSeries& other) const {
    if (layout_ != other.layout_) {
      throw std::invalid_argument("TruncatedSeries: mismatched variables or order");
    }
  }

  std::shared_ptr<const SeriesLayout> layout_;
  Vector coeffs_;
};

using Series = TruncatedSeries<double>;

namespace detail {
// sum_r weights[r] h^r for a series h without constant term; h^r vanishes for
// r > order, so the sum is exact.
template <typename Scalar>
TruncatedSeries<Scalar> nilpotent_sum(const TruncatedSeries<Scalar>& h,
                                      const std::vector<Scalar>& weights) {
  auto result = TruncatedSeries<Scalar>::constant(h.variables(), h.order(), weights[0]);
  auto power = TruncatedSeries<Scalar>::constant(h.variables(), h.order(), Scalar(1));
  for (std::size_t r = 1; r < weights.size() && static_cast<int>(r) <= h.order(); ++r) {
    power = power * h;
    auto term = power;
    term *= weights[r];
    result += term;
  }
  return result;
}
}  // namespace detail

template <typename Scalar>
TruncatedSeries<Scalar> exp(const TruncatedSeries<Scalar>& a) {
  using std::exp;
  const Scalar e0 = exp(a.value());
  std::vector<Scalar> weights(static_cast<std::size_t>(a.order() + 1));
  Scalar factorial_r = Scalar(1);
  for (std::size_t r = 0; r < weights.size(); ++r) {
    if (r > 0) factorial_r *= static_cast<Scalar>(r);
    weights[r] = e0 / factorial_r;
  }
  return detail::nilpotent_sum(a.displacement(), weights);
}

template <typename Scalar>
TruncatedSeries<Scalar> sin(const TruncatedSeries<Scalar>& a) {
  using std::cos;
  using std::sin;
  // sin(a0 + h) = sin a0 cos h + cos a0 sin h
  const Scalar s0 = sin(a.value());
  const Scalar c0 = cos(a.value());
  std::vector<Scalar> weights(static_cast<std::size_t>(a.order() + 1));
  Scalar factorial_r = Scalar(1);
  for (std::size_t r = 0; r < weights.size(); ++r) {
    if (r > 0) factorial_r *= static_cast<Scalar>(r);
    // r-th derivative of sin at a0
    const Scalar d = (r % 4 == 0) ? s0 : (r % 4 == 1) ? c0 : (r % 4 == 2) ? -s0 : -c0;
    weights[r] = d / factorial_r;
  }
  return detail::nilpotent_sum(a.displacement(), weights);
}

template <typename Scalar>
TruncatedSeries<Scalar> cos(const TruncatedSeries<Scalar>& a) {
  using std::cos;
  using std::sin;
  const Scalar s0 = sin(a.value());
  const Scalar c0 = cos(a.value());
  std::vector<Scalar> weights(static_cast<std::size_t>(a.order() + 1));
  Scalar factorial_r = Scalar(1);
  for (std::size_t r = 0; r < weights.size(); ++r) {
    if (r > 0) factorial_r *= static_cast<Scalar>(r);
    const Scalar d = (r % 4 == 0) ? c0 : (r % 4 == 1) ? -s0 : (r % 4 == 2) ? -c0 : s0;
    weights[r] = d / factorial_r;
  }
  return detail::nilpotent_sum(a.displacement(), weights);
}

/// Non-negative integer power by repeated squaring.
template <typename Scalar>
TruncatedSeries<Scalar> pow(const TruncatedSeries<Scalar>& a, int exponent) {
  if (exponent < 0) throw std::invalid_argument("pow: negative integer exponent");
  auto result = TruncatedSeries<Scalar>::constant(a.variables(), a.order(), Scalar(1));
  auto base = a;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

/// Real power; integral non-negative exponents use exact multiplication,
/// anything else needs a non-zero constant term.
template <typename Scalar>
TruncatedSeries<Scalar> pow(const TruncatedSeries<Scalar>& a, double exponent) {
  using std::pow;
  if (exponent >= 0 && exponent == std::floor(exponent) && exponent < 1e6) {
    return jetstress::pow(a, static_cast<int>(exponent));
  }
  const Scalar a0 = a.value();
  if (a0 == Scalar(0)) {
    throw std::domain_error("pow: non-integral power of a series with zero constant term");
  }
  // a0^p (1 + h/a0)^p with binomial weights
  std::vector<Scalar> weights(static_cast<std::size_t>(a.order() + 1));
  Scalar binom = Scalar(1);
  const Scalar base = pow(a0, exponent);
  Scalar inv_power = Scalar(1);
  for (std::size_t r = 0; r < weights.size(); ++r) {
    if (r > 0) {
      binom *= (exponent - static_cast<double>(r - 1)) / static_cast<double>(r);
      inv_power /= a0;
    }
    weights[r] = base * binom * inv_power;
  }
  return detail::nilpotent_sum(a.displacement(), weights);
}

/// Composition g(inner) where `outer` holds the Taylor coefficients of g
/// expanded about the constant terms of `inner`. The result lives in the
/// inner layout and is exact to min(outer order, inner order).
template <typename Scalar>
TruncatedSeries<Scalar> compose(const TruncatedSeries<Scalar>& outer,
                                std::span<const TruncatedSeries<Scalar>> inner) {
  if (static_cast<int>(inner.size()) != outer.variables()) {
    throw std::invalid_argument("compose: inner arity differs from outer variable count");
  }
  if (inner.empty()) throw std::invalid_argument("compose: empty inner list");
  const int order = inner.front().order();
  const int vars = inner.front().variables();
  std::vector<TruncatedSeries<Scalar>> displacement;
  displacement.reserve(inner.size());
  for (const auto& s : inner) {
    if (s.order() != order || s.variables() != vars) {
      throw std::invalid_argument("compose: inner series have mismatched layouts");
    }
    displacement.push_back(s.displacement());
  }
  const int degree_limit = std::min(order, outer.order());
  const auto& basis = outer.layout()->basis();
  // Powers h^K for every K up to degree_limit, built in graded order.
  std::vector<TruncatedSeries<Scalar>> powers;
  powers.reserve(static_cast<std::size_t>(graded_dimension(outer.variables(), degree_limit)));
  auto result = TruncatedSeries<Scalar>::zero(vars, order);
  for (int k = 0; k < graded_dimension(outer.variables(), degree_limit); ++k) {
    const MultiIndex& index = basis[static_cast<std::size_t>(k)];
    if (k == 0) {
      powers.push_back(TruncatedSeries<Scalar>::constant(vars, order, Scalar(1)));
    } else {
      int j = 0;
      while (index[j] == 0) ++j;
      powers.push_back(powers[static_cast<std::size_t>(graded_rank(remove(index, j)))] *
                       displacement[static_cast<std::size_t>(j)]);
    }
    const Scalar c = outer.coeffs()(k);
    if (c != Scalar(0)) {
      auto term = powers.back();
      term *= c;
      result += term;
    }
  }
  return result;
}

}  // namespace jetstress
