#include "jetstress/jetfield.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

namespace jetstress {

namespace {

bool is_identity_expansion(std::span<const Series> in);

// Polynomial expressions are expanded directly: the Taylor coefficient of
// t^I at x of sum_K p_K y^K is sum_{K >= I} p_K binom(K, I) x^{K-I}.
using Monomials = std::map<std::vector<int>, double>;
constexpr std::size_t kMonomialCap = 4096;

std::optional<Monomials> multiply(const Monomials& a, const Monomials& b) {
  Monomials out;
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      std::vector<int> k = ka;
      for (std::size_t r = 0; r < k.size(); ++r) k[r] += kb[r];
      out[k] += ca * cb;
      if (out.size() > kMonomialCap) return std::nullopt;
    }
  }
  return out;
}

void accumulate(Monomials& into, const Monomials& add, double sign) {
  for (const auto& [k, c] : add) into[k] += sign * c;
}

Monomials constant_poly(int n, double c) { return Monomials{{std::vector<int>(static_cast<std::size_t>(n), 0), c}}; }

std::optional<Monomials> power(const Monomials& base, int e, int n) {
  std::optional<Monomials> acc = constant_poly(n, 1.0);
  for (int i = 0; i < e && acc; ++i) acc = multiply(*acc, base);
  return acc;
}

std::optional<Monomials> to_polynomial(const Expr& e, int n) {
  using Op = Expr::Op;
  switch (e.op()) {
    case Op::constant:
      return constant_poly(n, e.value());
    case Op::variable: {
      std::vector<int> k(static_cast<std::size_t>(n), 0);
      k[static_cast<std::size_t>(e.index())] = 1;
      return Monomials{{k, 1.0}};
    }
    case Op::add:
    case Op::sub: {
      Monomials out;
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        auto a = to_polynomial(e.args()[i], n);
        if (!a) return std::nullopt;
        accumulate(out, *a, e.op() == Op::sub && i > 0 ? -1.0 : 1.0);
      }
      return out;
    }
    case Op::neg: {
      auto a = to_polynomial(e.args()[0], n);
      if (!a) return std::nullopt;
      for (auto& [k, c] : *a) c = -c;
      return a;
    }
    case Op::mul: {
      std::optional<Monomials> acc = constant_poly(n, 1.0);
      for (const auto& arg : e.args()) {
        auto a = to_polynomial(arg, n);
        if (!a) return std::nullopt;
        acc = multiply(*acc, *a);
        if (!acc) return std::nullopt;
      }
      return acc;
    }
    case Op::pow: {
      const double p = e.exponent();
      if (p < 0 || p != std::floor(p) || p > 64) return std::nullopt;
      auto a = to_polynomial(e.args()[0], n);
      if (!a) return std::nullopt;
      return power(*a, static_cast<int>(p), n);
    }
    case Op::compose: {
      std::vector<Monomials> inner;
      for (const auto& arg : e.args()) {
        auto a = to_polynomial(arg, n);
        if (!a) return std::nullopt;
        inner.push_back(std::move(*a));
      }
      const auto outer = to_polynomial(e.outer(), static_cast<int>(inner.size()));
      if (!outer) return std::nullopt;
      Monomials out;
      for (const auto& [k, c] : *outer) {
        std::optional<Monomials> term = constant_poly(n, c);
        for (std::size_t r = 0; r < k.size() && term; ++r) {
          if (k[r] == 0) continue;
          auto pr = power(inner[r], k[r], n);
          term = pr ? multiply(*term, *pr) : std::nullopt;
        }
        if (!term) return std::nullopt;
        accumulate(out, *term, 1.0);
        if (out.size() > kMonomialCap) return std::nullopt;
      }
      return out;
    }
    default:
      return std::nullopt;
  }
}

struct Polynomial {
  std::vector<std::vector<int>> exponents;
  std::vector<double> coefficients;
  int degree = 0;
};

// Taylor expansions of every polynomial at x, to the given order.
std::vector<Series> expand_polynomials(const std::vector<Polynomial>& polys, int n, const Eigen::VectorXd& x,
                                       int order) {
  int max_degree = 0;
  for (const auto& p : polys) max_degree = std::max(max_degree, p.degree);
  Eigen::MatrixXd pw(n, max_degree + 1);
  for (int i = 0; i < n; ++i) {
    pw(i, 0) = 1.0;
    for (int e = 1; e <= max_degree; ++e) pw(i, e) = pw(i, e - 1) * x(i);
  }
  Eigen::MatrixXd binom = Eigen::MatrixXd::Zero(max_degree + 1, max_degree + 1);
  for (int a = 0; a <= max_degree; ++a) {
    binom(a, 0) = 1.0;
    for (int b = 1; b <= a; ++b) binom(a, b) = binom(a - 1, b - 1) + (b <= a - 1 ? binom(a - 1, b) : 0.0);
  }
  const auto layout = SeriesLayout::get(n, order);
  const auto& basis = layout->basis();
  std::vector<Series> out;
  out.reserve(polys.size());
  for (const auto& p : polys) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(layout->size());
    for (std::size_t t = 0; t < p.exponents.size(); ++t) {
      const auto& k = p.exponents[t];
      for (int b = 0; b < layout->size(); ++b) {
        const auto& index = basis[static_cast<std::size_t>(b)];
        double f = p.coefficients[t];
        for (int i = 0; i < n && f != 0.0; ++i) {
          const int ki = k[static_cast<std::size_t>(i)], ii = index[i];
          f = ii > ki ? 0.0 : f * binom(ki, ii) * pw(i, ki - ii);
        }
        c(b) += f;
      }
    }
    out.emplace_back(layout, std::move(c));
  }
  return out;
}

}  // namespace

SmoothMap::SmoothMap(int inputs, int outputs, Function fn)
    : inputs_(inputs), outputs_(outputs), fn_(std::move(fn)) {
  if (inputs < 1) throw std::invalid_argument("SmoothMap: needs at least one input");
}

SmoothMap SmoothMap::from_expressions(int inputs, std::vector<Expr> outputs) {
  for (const auto& e : outputs) {
    if (e.arity() > inputs) {
      throw std::invalid_argument("SmoothMap: expression reads more variables than the map has inputs");
    }
  }
  const int count = static_cast<int>(outputs.size());
  auto polys = std::make_shared<std::vector<Polynomial>>();
  for (const auto& e : outputs) {
    auto mono = to_polynomial(e, inputs);
    if (!mono) {
      polys.reset();
      break;
    }
    Polynomial p;
    for (const auto& [k, c] : *mono) {
      if (c == 0.0) continue;
      p.exponents.push_back(k);
      p.coefficients.push_back(c);
      int d = 0;
      for (int v : k) d += v;
      p.degree = std::max(p.degree, d);
    }
    polys->push_back(std::move(p));
  }
  if (polys) {
    SmoothMap map(inputs, count, [polys, inputs](std::span<const Series> in) {
      const int order = in.front().order();
      Eigen::VectorXd x0(inputs);
      for (int i = 0; i < inputs; ++i) x0(i) = in[static_cast<std::size_t>(i)].value();
      auto local = expand_polynomials(*polys, inputs, x0, order);
      if (is_identity_expansion(in)) return local;
      for (auto& s : local) s = compose<double>(s, in);
      return local;
    });
    map.expressions_ = std::move(outputs);
    return map;
  }
  auto shared = std::make_shared<const std::vector<Expr>>(outputs);
  SmoothMap map(inputs, count, [shared](std::span<const Series> in) {
    std::vector<Series> out;
    out.reserve(shared->size());
    for (const auto& e : *shared) out.push_back(e.evaluate<Series>(in, in.front()));
    return out;
  });
  map.expressions_ = std::move(outputs);
  return map;
}

SmoothMap SmoothMap::constant(int inputs, const Eigen::VectorXd& values) {
  std::vector<Expr> exprs;
  for (Eigen::Index i = 0; i < values.size(); ++i) exprs.push_back(Expr::constant(values(i)));
  return from_expressions(inputs, std::move(exprs));
}

SmoothMap SmoothMap::identity(int n) {
  std::vector<Expr> exprs;
  for (int i = 0; i < n; ++i) exprs.push_back(Expr::variable(i));
  return from_expressions(n, std::move(exprs));
}

std::vector<Series> SmoothMap::operator()(std::span<const Series> in) const {
  if (static_cast<int>(in.size()) != inputs_) {
    throw std::invalid_argument("SmoothMap: wrong number of inputs");
  }
  auto out = fn_(in);
  if (static_cast<int>(out.size()) != outputs_) {
    throw std::logic_error("SmoothMap: evaluator returned the wrong number of outputs");
  }
  return out;
}

std::vector<Series> SmoothMap::expand(const Eigen::VectorXd& x, int order) const {
  if (x.size() != inputs_) throw std::invalid_argument("SmoothMap::expand: point dimension mismatch");
  std::vector<Series> in;
  in.reserve(static_cast<std::size_t>(inputs_));
  for (int i = 0; i < inputs_; ++i) in.push_back(Series::variable(inputs_, order, i, x(i)));
  return (*this)(in);
}

Eigen::VectorXd SmoothMap::value(const Eigen::VectorXd& x) const {
  auto out = expand(x, 0);
  Eigen::VectorXd v(outputs_);
  for (int i = 0; i < outputs_; ++i) v(i) = out[static_cast<std::size_t>(i)].value();
  return v;
}

Eigen::MatrixXd SmoothMap::jacobian(const Eigen::VectorXd& x) const {
  auto out = expand(x, 1);
  Eigen::MatrixXd jac(outputs_, inputs_);
  for (int r = 0; r < outputs_; ++r) {
    for (int c = 0; c < inputs_; ++c) jac(r, c) = out[static_cast<std::size_t>(r)].coeffs()(1 + c);
  }
  return jac;
}

namespace {
bool is_identity_expansion(std::span<const Series> in) {
  if (in.empty() || in.front().variables() != static_cast<int>(in.size())) return false;
  const int n = static_cast<int>(in.size());
  for (int i = 0; i < n; ++i) {
    const auto& s = in[static_cast<std::size_t>(i)];
    if (s.variables() != n) return false;
    const auto& c = s.coeffs();
    for (Eigen::Index r = 1; r < c.size(); ++r) {
      const double expected = (s.order() >= 1 && r == 1 + i) ? 1.0 : 0.0;
      if (c(r) != expected) return false;
    }
  }
  return true;
}
}  // namespace

SmoothMap differential_map(const SmoothMap& base, int outputs, int extra, JetOperator op) {
  const int n = base.inputs();
  return SmoothMap(n, outputs, [base, outputs, extra, op, n](std::span<const Series> in) {
    const int order = in.front().order();
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0(i) = in[static_cast<std::size_t>(i)].value();
    const auto expanded = base.expand(x0, order + extra);
    auto local = op(expanded, order);
    if (static_cast<int>(local.size()) != outputs) {
      throw std::logic_error("differential_map: operator returned the wrong number of outputs");
    }
    for (auto& s : local) {
      if (s.order() < order) throw std::logic_error("differential_map: operator lost accuracy");
      s = s.truncated(order);
    }
    if (is_identity_expansion(in)) return local;
    std::vector<Series> out;
    out.reserve(local.size());
    for (const auto& s : local) out.push_back(compose<double>(s, in));
    return out;
  });
}

SmoothMap concatenate(const SmoothMap& a, const SmoothMap& b) {
  if (a.inputs() != b.inputs()) throw std::invalid_argument("concatenate: input dimension mismatch");
  return SmoothMap(a.inputs(), a.outputs() + b.outputs(), [a, b](std::span<const Series> in) {
    auto out = a(in);
    auto tail = b(in);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
  });
}

SmoothMap linear_image(const SmoothMap& base, const Eigen::MatrixXd& matrix) {
  if (matrix.cols() != base.outputs()) throw std::invalid_argument("linear_image: shape mismatch");
  return SmoothMap(base.inputs(), static_cast<int>(matrix.rows()),
                   [base, matrix](std::span<const Series> in) {
                     const auto values = base(in);
                     std::vector<Series> out;
                     out.reserve(static_cast<std::size_t>(matrix.rows()));
                     for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
                       auto acc = Series::zero(in.front().variables(), in.front().order());
                       for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
                         if (matrix(r, c) != 0.0) acc += matrix(r, c) * values[static_cast<std::size_t>(c)];
                       }
                       out.push_back(std::move(acc));
                     }
                     return out;
                   });
}

SmoothMap chain(const SmoothMap& outer, const SmoothMap& inner) {
  if (outer.inputs() != inner.outputs()) throw std::invalid_argument("chain: dimension mismatch");
  return SmoothMap(inner.inputs(), outer.outputs(),
                   [outer, inner](std::span<const Series> in) { return outer(inner(in)); });
}

// ---------------------------------------------------------------------------

JetPoint::JetPoint(int n_, int m_, int order_)
    : n(n_), m(m_), order(order_), values(Eigen::MatrixXd::Zero(m_, graded_dimension(n_, order_))) {}

JetPoint::JetPoint(int n_, int m_, int order_, Eigen::MatrixXd values_)
    : n(n_), m(m_), order(order_), values(std::move(values_)) {
  if (values.rows() != m || values.cols() != graded_dimension(n, order)) {
    throw std::invalid_argument("JetPoint: value shape mismatch");
  }
}

double JetPoint::operator()(int alpha, const MultiIndex& index) const {
  return values(alpha, graded_rank(index));
}

double& JetPoint::operator()(int alpha, const MultiIndex& index) {
  return values(alpha, graded_rank(index));
}

SymArray JetPoint::block(int alpha, int deg) const {
  return SymArray(n, deg, Convention::derivative,
                  values.row(alpha).segment(graded_dimension(n, deg - 1), symmetric_dimension(n, deg)).transpose());
}

JetPoint JetPoint::truncated(int lower) const {
  if (lower > order) throw std::invalid_argument("JetPoint::truncated: cannot raise the order");
  return JetPoint(n, m, lower, values.leftCols(graded_dimension(n, lower)));
}

Eigen::VectorXd JetPoint::flatten() const {
  Eigen::MatrixXd t = values.transpose();
  return Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
}

JetPoint JetPoint::unflatten(int n, int m, int order, const Eigen::VectorXd& flat) {
  const int width = graded_dimension(n, order);
  if (flat.size() != m * width) throw std::invalid_argument("JetPoint::unflatten: size mismatch");
  Eigen::MatrixXd values(m, width);
  for (int a = 0; a < m; ++a) values.row(a) = flat.segment(a * width, width).transpose();
  return JetPoint(n, m, order, std::move(values));
}

NonHolJetPoint::NonHolJetPoint(int n_, int m_, int k_) : n(n_), m(m_), k(k_) {
  if (k < 1) throw std::invalid_argument("NonHolJetPoint requires k >= 1");
  const int width = graded_dimension(n, k - 1);
  lambda = Eigen::MatrixXd::Zero(m, width);
  mu.assign(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(width, n));
}

AlmostSymArray NonHolJetPoint::mu_block(int alpha, int r) const {
  return AlmostSymArray(n, r + 1,
                        mu[static_cast<std::size_t>(alpha)].middleRows(graded_dimension(n, r - 1),
                                                                        symmetric_dimension(n, r)));
}

int NonHolJetPoint::components() const {
  return m * graded_dimension(n, k - 1) * (1 + n);
}

Eigen::VectorXd NonHolJetPoint::flatten() const {
  const int width = graded_dimension(n, k - 1);
  Eigen::VectorXd flat(components());
  Eigen::Index pos = 0;
  for (int a = 0; a < m; ++a) {
    flat.segment(pos, width) = lambda.row(a).transpose();
    pos += width;
  }
  for (int a = 0; a < m; ++a) {
    for (int r = 0; r < width; ++r) {
      flat.segment(pos, n) = mu[static_cast<std::size_t>(a)].row(r).transpose();
      pos += n;
    }
  }
  return flat;
}

NonHolJetPoint NonHolJetPoint::unflatten(int n, int m, int k, const Eigen::VectorXd& flat) {
  NonHolJetPoint p(n, m, k);
  if (flat.size() != p.components()) throw std::invalid_argument("NonHolJetPoint::unflatten: size mismatch");
  const int width = graded_dimension(n, k - 1);
  Eigen::Index pos = 0;
  for (int a = 0; a < m; ++a) {
    p.lambda.row(a) = flat.segment(pos, width).transpose();
    pos += width;
  }
  for (int a = 0; a < m; ++a) {
    for (int r = 0; r < width; ++r) {
      p.mu[static_cast<std::size_t>(a)].row(r) = flat.segment(pos, n).transpose();
      pos += n;
    }
  }
  return p;
}

JetPoint prolong(const SmoothMap& section, const Eigen::VectorXd& x, int k) {
  const int n = section.inputs();
  const int m = section.outputs();
  const auto expanded = section.expand(x, k);
  JetPoint u(n, m, k);
  const auto basis = enumerate_up_to(n, k);
  for (int a = 0; a < m; ++a) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      u.values(a, static_cast<Eigen::Index>(i)) = expanded[static_cast<std::size_t>(a)].partial(basis[i]);
    }
  }
  return u;
}

namespace {
Series partial_series(Series s, const MultiIndex& index) {
  for (int j : index.sequence()) s = s.derivative(j);
  return s;
}
}  // namespace

SmoothMap jet_section(const SmoothMap& section, int order) {
  const int n = section.inputs();
  const int m = section.outputs();
  const auto basis = enumerate_up_to(n, order);
  return differential_map(section, m * static_cast<int>(basis.size()), order,
                          [basis, m](std::span<const Series> expanded, int) {
                            std::vector<Series> out;
                            out.reserve(static_cast<std::size_t>(m) * basis.size());
                            for (int a = 0; a < m; ++a) {
                              for (const auto& index : basis) {
                                out.push_back(partial_series(expanded[static_cast<std::size_t>(a)], index));
                              }
                            }
                            return out;
                          });
}

NonHolJetPoint prolong_section_of_jets(const SmoothMap& lambda, int m, int k,
                                       const Eigen::VectorXd& x) {
  const int n = lambda.inputs();
  const int width = graded_dimension(n, k - 1);
  if (lambda.outputs() != m * width) {
    throw std::invalid_argument("prolong_section_of_jets: component count does not match (m, k)");
  }
  const auto expanded = lambda.expand(x, 1);
  NonHolJetPoint p(n, m, k);
  for (int a = 0; a < m; ++a) {
    for (int r = 0; r < width; ++r) {
      const auto& s = expanded[static_cast<std::size_t>(a * width + r)];
      p.lambda(a, r) = s.value();
      for (int j = 0; j < n; ++j) p.mu[static_cast<std::size_t>(a)](r, j) = s.coeffs()(1 + j);
    }
  }
  return p;
}

NonHolJetPoint include_holonomic(const JetPoint& u) {
  NonHolJetPoint p(u.n, u.m, u.order);
  const auto heads = enumerate_up_to(u.n, u.order - 1);
  for (int a = 0; a < u.m; ++a) {
    for (std::size_t r = 0; r < heads.size(); ++r) {
      p.lambda(a, static_cast<Eigen::Index>(r)) = u(a, heads[r]);
      for (int j = 0; j < u.n; ++j) {
        p.mu[static_cast<std::size_t>(a)](static_cast<Eigen::Index>(r), j) = u(a, append(heads[r], j));
      }
    }
  }
  return p;
}

bool is_holonomic(const NonHolJetPoint& p, double tol) {
  for (int a = 0; a < p.m; ++a) {
    for (const auto& index : enumerate_up_to(p.n, p.k)) {
      const int deg = degree(index);
      if (deg == 0) continue;
      std::optional<double> reference;
      if (deg <= p.k - 1) reference = p.lambda(a, graded_rank(index));
      for (int j = 0; j < p.n; ++j) {
        if (index[j] == 0) continue;
        const double v = p.mu[static_cast<std::size_t>(a)](graded_rank(remove(index, j)), j);
        if (!reference) {
          reference = v;
        } else if (std::abs(v - *reference) > tol) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace jetstress
