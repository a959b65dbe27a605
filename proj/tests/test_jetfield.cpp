#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "jetstress/jetfield.hpp"

using namespace jetstress;
using jetstress::testing::for_all;
using jetstress::testing::Gen;

namespace {

// Same expressions, evaluated node by node on series (no polynomial shortcut).
SmoothMap tree_map(int n, std::vector<Expr> exprs) {
  const int count = static_cast<int>(exprs.size());
  return SmoothMap(n, count, [exprs](std::span<const Series> in) {
    std::vector<Series> out;
    for (const auto& e : exprs) out.push_back(e.evaluate<Series>(in, in.front()));
    return out;
  });
}

double monomial_derivative(const std::vector<int>& k, const MultiIndex& index, const Eigen::VectorXd& x) {
  double v = 1.0;
  for (int i = 0; i < index.dimension(); ++i) {
    const int ki = k[static_cast<std::size_t>(i)], d = index[i];
    if (d > ki) return 0.0;
    for (int r = 0; r < d; ++r) v *= ki - r;
    v *= std::pow(x(i), ki - d);
  }
  return v;
}

}  // namespace

TEST(Series, ProductTruncates) {
  const auto x = Series::variable(2, 2, 0, 0.5);
  const auto y = Series::variable(2, 2, 1, -1.0);
  const auto p = x * y;  // (0.5 + s)(-1 + t) = -0.5 + 0.5 t - s + s t
  EXPECT_DOUBLE_EQ(p.value(), -0.5);
  EXPECT_DOUBLE_EQ(p.coefficient(MultiIndex({1, 0})), -1.0);
  EXPECT_DOUBLE_EQ(p.coefficient(MultiIndex({0, 1})), 0.5);
  EXPECT_DOUBLE_EQ(p.coefficient(MultiIndex({1, 1})), 1.0);
  const auto cube = x * x * x;
  EXPECT_DOUBLE_EQ(cube.coefficient(MultiIndex({3, 0})), 0.0);  // beyond order 2
}

TEST(Series, TranscendentalsMatchClosedForms) {
  const auto x = Series::variable(1, 5, 0, 0.3);
  const auto e = exp(x), s = sin(x), c = cos(x);
  double fact = 1.0;
  for (int r = 0; r <= 5; ++r) {
    if (r > 0) fact *= r;
    const MultiIndex index({r});
    EXPECT_NEAR(e.coefficient(index), std::exp(0.3) / fact, 1e-15);
    const double ds = std::sin(0.3 + r * M_PI / 2), dc = std::cos(0.3 + r * M_PI / 2);
    EXPECT_NEAR(s.coefficient(index), ds / fact, 1e-15);
    EXPECT_NEAR(c.coefficient(index), dc / fact, 1e-15);
  }
  const auto root = pow(Series::variable(1, 3, 0, 4.0), 0.5);
  EXPECT_NEAR(root.value(), 2.0, 1e-15);
  EXPECT_NEAR(root.coefficient(MultiIndex({1})), 0.25, 1e-15);
}

TEST(Jetfield, ProlongOfMonomialsIsExact) {
  for_all(31, 60, [](Gen& g) {
    const int n = g.integer(1, 3), k = g.integer(1, 4);
    std::vector<int> exps(static_cast<std::size_t>(n));
    for (auto& e : exps) e = g.integer(0, 3);
    const double c = g.integer(-3, 3);
    const auto w = SmoothMap::from_expressions(n, {Expr::monomial(c, exps)});
    const auto x = g.point(n);
    const auto u = prolong(w, x, k);
    for (const auto& index : enumerate_up_to(n, k)) {
      EXPECT_NEAR(u(0, index), c * monomial_derivative(exps, index, x), 1e-12);
    }
  });
}

TEST(Jetfield, PolynomialShortcutMatchesTreeEvaluation) {
  for_all(32, 40, [](Gen& g) {
    const int n = g.integer(1, 3), order = g.integer(0, 4);
    std::vector<Expr> exprs;
    for (int i = 0; i < 3; ++i) exprs.push_back(random_polynomial(n, g.integer(0, 4), g.rng));
    // Products and compositions are expanded too.
    std::vector<Expr> inner{exprs[2]};
    for (int i = 1; i < n; ++i) inner.push_back(Expr::variable(i - 1) * Expr::variable(i));
    exprs.push_back(Expr::compose(exprs[0] * exprs[1], inner));
    const auto fast = SmoothMap::from_expressions(n, exprs);
    const auto slow = tree_map(n, exprs);
    const auto x = g.point(n);
    const auto a = fast.expand(x, order), b = slow.expand(x, order);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double scale = std::max(1.0, b[i].coeffs().cwiseAbs().maxCoeff());
      // The composite reaches degree 16; the two evaluation orders differ by roundoff.
      const double tol = i + 1 == a.size() ? 1e-10 : 1e-13;
      EXPECT_LE((a[i].coeffs() - b[i].coeffs()).cwiseAbs().maxCoeff() / scale, tol);
    }
  });
}

TEST(Jetfield, NonPolynomialExpressionsUseSeriesArithmetic) {
  const auto w = SmoothMap::from_expressions(2, {Expr::sin(Expr::variable(0)) * Expr::exp(Expr::variable(1))});
  Eigen::VectorXd x(2);
  x << 0.4, -0.2;
  const auto u = prolong(w, x, 3);
  EXPECT_NEAR(u(0, MultiIndex({2, 1})), -std::sin(0.4) * std::exp(-0.2), 1e-14);
  EXPECT_NEAR(u(0, MultiIndex({1, 2})), std::cos(0.4) * std::exp(-0.2), 1e-14);
}

TEST(Jetfield, CompositeMapsThroughChain) {
  for_all(33, 30, [](Gen& g) {
    const int n = 2;
    const auto inner = random_polynomial_map(n, n, 2, g.rng);
    const auto outer = random_polynomial_map(n, 1, 2, g.rng);
    const auto c = chain(outer, inner);
    const auto x = g.point(n);
    EXPECT_NEAR(c.value(x)(0), outer.value(inner.value(x))(0), 1e-12);
    const Eigen::MatrixXd jac = outer.jacobian(inner.value(x)) * inner.jacobian(x);
    EXPECT_LE((c.jacobian(x) - jac).cwiseAbs().maxCoeff(), 1e-12);
  });
}

TEST(Jetfield, HolonomicInclusionAndJetOfJets) {
  for_all(34, 40, [](Gen& g) {
    const int n = g.integer(1, 3), m = g.integer(1, 2), k = g.integer(1, 3);
    const auto w = random_polynomial_map(n, m, k + 1, g.rng);
    const auto x = g.point(n);
    const auto q = prolong_section_of_jets(jet_section(w, k - 1), m, k, x);
    EXPECT_LE((q.flatten() - include_holonomic(prolong(w, x, k)).flatten()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(is_holonomic(q, 1e-10));
  });
}

TEST(Jetfield, GenericJetOfJetsIsNotHolonomic) {
  Gen g(35);
  const auto q = random_nonholonomic_jet(2, 1, 2, g.rng);
  EXPECT_FALSE(is_holonomic(q, 1e-10));
}

TEST(Jetfield, FlattenRoundTrip) {
  for_all(36, 50, [](Gen& g) {
    const int n = g.integer(1, 3), m = g.integer(1, 3), k = g.integer(1, 4);
    const auto u = random_jet(n, m, k, g.rng);
    EXPECT_EQ(JetPoint::unflatten(n, m, k, u.flatten()).flatten(), u.flatten());
    const auto q = random_nonholonomic_jet(n, m, k, g.rng);
    EXPECT_EQ(NonHolJetPoint::unflatten(n, m, k, q.flatten()).flatten(), q.flatten());
  });
}

TEST(Jetfield, RejectsMismatchedShapes) {
  const auto w = SmoothMap::identity(2);
  EXPECT_THROW(w.value(Eigen::VectorXd::Zero(3)), std::invalid_argument);
  EXPECT_THROW(SmoothMap::from_expressions(1, {Expr::variable(1)}), std::invalid_argument);
}
