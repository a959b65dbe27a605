#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jetstress/series.hpp"

namespace jetstress {

/// Immutable expression tree over {const, coordinate, +, -, *, pow, sin, cos,
/// exp} plus substitution (compose). Variables are 0-based here; the JSON
/// grammar numbers them from 1.
///
/// Evaluation is generic over the arithmetic type: double for point values,
/// Series for Taylor expansions. Shared subtrees are fine; nodes are never
/// mutated after construction.
class Expr {
 public:
  enum class Op { constant, variable, add, sub, mul, neg, pow, sin, cos, exp, compose };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double value);
  static Expr variable(int index);
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  static Expr pow(Expr base, double exponent);
  static Expr sin(Expr arg);
  static Expr cos(Expr arg);
  static Expr exp(Expr arg);
  /// outer(inner[0], inner[1], ...): variable i of outer is replaced by inner[i].
  static Expr compose(Expr outer, std::vector<Expr> inner);

  /// c * prod_r x_r^{exponents[r]}
  static Expr monomial(double coefficient, const std::vector<int>& exponents);

  friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
  friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  Op op() const { return node_->op; }
  double value() const { return node_->value; }
  int index() const { return node_->index; }
  double exponent() const { return node_->value; }
  const std::vector<Expr>& args() const { return node_->args; }
  /// For compose nodes: the outer expression (args() holds the inner list).
  const Expr& outer() const { return *node_->outer; }

  /// One more than the largest variable index the expression reads.
  int arity() const;

  template <typename T>
  T evaluate(std::span<const T> vars, const T& like) const;

  double evaluate(std::span<const double> vars) const { return evaluate<double>(vars, 0.0); }

 private:
  struct Node {
    Op op = Op::constant;
    double value = 0.0;
    int index = 0;
    std::vector<Expr> args;
    std::shared_ptr<const Expr> outer;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Expr make(Node node) { return Expr(std::make_shared<const Node>(std::move(node))); }

  std::shared_ptr<const Node> node_;
};

const char* to_string(Expr::Op op);

namespace detail {
inline double lift(double c, double) { return c; }
template <typename Scalar>
TruncatedSeries<Scalar> lift(double c, const TruncatedSeries<Scalar>& like) {
  return TruncatedSeries<Scalar>::constant(like.variables(), like.order(), Scalar(c));
}
}  // namespace detail

template <typename T>
T Expr::evaluate(std::span<const T> vars, const T& like) const {
  using std::cos;
  using std::exp;
  using std::pow;
  using std::sin;
  switch (op()) {
    case Op::constant:
      return detail::lift(value(), like);
    case Op::variable:
      if (index() < 0 || index() >= static_cast<int>(vars.size())) {
        throw std::out_of_range("Expr: variable " + std::to_string(index()) +
                                " outside the supplied inputs");
      }
      return vars[static_cast<std::size_t>(index())];
    case Op::add: {
      T acc = args().front().evaluate(vars, like);
      for (std::size_t i = 1; i < args().size(); ++i) acc = acc + args()[i].evaluate(vars, like);
      return acc;
    }
    case Op::sub:
      return args()[0].evaluate(vars, like) - args()[1].evaluate(vars, like);
    case Op::mul: {
      T acc = args().front().evaluate(vars, like);
      for (std::size_t i = 1; i < args().size(); ++i) acc = acc * args()[i].evaluate(vars, like);
      return acc;
    }
    case Op::neg:
      return -args()[0].evaluate(vars, like);
    case Op::pow:
      return pow(args()[0].evaluate(vars, like), exponent());
    case Op::sin:
      return sin(args()[0].evaluate(vars, like));
    case Op::cos:
      return cos(args()[0].evaluate(vars, like));
    case Op::exp:
      return exp(args()[0].evaluate(vars, like));
    case Op::compose: {
      std::vector<T> inner;
      inner.reserve(args().size());
      for (const auto& a : args()) inner.push_back(a.evaluate(vars, like));
      return outer().evaluate(std::span<const T>(inner), like);
    }
  }
  throw std::logic_error("Expr: unknown op");
}

}  // namespace jetstress
