#include "jetstress/expr.hpp"

#include <algorithm>

namespace jetstress {

Expr Expr::constant(double value) {
  Node node;
  node.op = Op::constant;
  node.value = value;
  return make(std::move(node));
}

Expr Expr::variable(int index) {
  if (index < 0) throw std::invalid_argument("Expr::variable: negative index");
  Node node;
  node.op = Op::variable;
  node.index = index;
  return make(std::move(node));
}

Expr Expr::sum(std::vector<Expr> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms.front();
  Node node;
  node.op = Op::add;
  node.args = std::move(terms);
  return make(std::move(node));
}

Expr Expr::product(std::vector<Expr> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors.front();
  Node node;
  node.op = Op::mul;
  node.args = std::move(factors);
  return make(std::move(node));
}

Expr Expr::pow(Expr base, double exponent) {
  Node node;
  node.op = Op::pow;
  node.value = exponent;
  node.args = {std::move(base)};
  return make(std::move(node));
}

Expr Expr::sin(Expr arg) {
  Node node;
  node.op = Op::sin;
  node.args = {std::move(arg)};
  return make(std::move(node));
}

Expr Expr::cos(Expr arg) {
  Node node;
  node.op = Op::cos;
  node.args = {std::move(arg)};
  return make(std::move(node));
}

Expr Expr::exp(Expr arg) {
  Node node;
  node.op = Op::exp;
  node.args = {std::move(arg)};
  return make(std::move(node));
}

Expr Expr::compose(Expr outer, std::vector<Expr> inner) {
  if (outer.arity() > static_cast<int>(inner.size())) {
    throw std::invalid_argument("Expr::compose: outer reads more variables than supplied");
  }
  Node node;
  node.op = Op::compose;
  node.args = std::move(inner);
  node.outer = std::make_shared<const Expr>(std::move(outer));
  return make(std::move(node));
}

Expr Expr::monomial(double coefficient, const std::vector<int>& exponents) {
  std::vector<Expr> factors{constant(coefficient)};
  for (std::size_t r = 0; r < exponents.size(); ++r) {
    if (exponents[r] == 0) continue;
    auto x = variable(static_cast<int>(r));
    factors.push_back(exponents[r] == 1 ? x : pow(x, exponents[r]));
  }
  return product(std::move(factors));
}

Expr operator-(const Expr& a, const Expr& b) {
  Expr::Node node;
  node.op = Expr::Op::sub;
  node.args = {a, b};
  return Expr::make(std::move(node));
}

Expr operator-(const Expr& a) {
  Expr::Node node;
  node.op = Expr::Op::neg;
  node.args = {a};
  return Expr::make(std::move(node));
}

int Expr::arity() const {
  switch (op()) {
    case Op::constant:
      return 0;
    case Op::variable:
      return index() + 1;
    case Op::compose: {
      int a = 0;
      for (const auto& arg : args()) a = std::max(a, arg.arity());
      return a;
    }
    default: {
      int a = 0;
      for (const auto& arg : args()) a = std::max(a, arg.arity());
      return a;
    }
  }
}

const char* to_string(Expr::Op op) {
  switch (op) {
    case Expr::Op::constant: return "const";
    case Expr::Op::variable: return "var";
    case Expr::Op::add: return "add";
    case Expr::Op::sub: return "sub";
    case Expr::Op::mul: return "mul";
    case Expr::Op::neg: return "neg";
    case Expr::Op::pow: return "pow";
    case Expr::Op::sin: return "sin";
    case Expr::Op::cos: return "cos";
    case Expr::Op::exp: return "exp";
    case Expr::Op::compose: return "compose";
  }
  return "?";
}

}  // namespace jetstress
