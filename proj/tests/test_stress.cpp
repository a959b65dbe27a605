#include <gtest/gtest.h>

#include "generators.hpp"
#include "jetstress/stress.hpp"

using namespace jetstress;
using jetstress::testing::for_all;
using jetstress::testing::Gen;

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct Shape {
  int n, m, k;
};

Shape random_shape(Gen& g, int k_min = 1) { return {g.integer(1, 3), g.integer(1, 2), g.integer(k_min, 3)}; }

}  // namespace

TEST(Stress, DualRestrictionProperty) {
  for_all(41, 40, [](Gen& g) {
    const auto [n, m, k] = random_shape(g);
    const auto p = random_nhs(n, m, k, g.rng);
    const auto w = random_polynomial_map(n, m, k + 1, g.rng);
    const auto x = g.point(n);
    const auto u = prolong(w, x, k);
    EXPECT_NEAR(nh_pair(p, include_holonomic(u)), var_pair(restrict_to_holonomic(p), u), 1e-12);
  });
}

TEST(Stress, WrongCollapseBreaksDuality) {
  const CollapseFn doubled = [](const AlmostSymArray& t) {
    auto r = collapse_last(t);
    const auto list = enumerate(t.n, t.l);
    for (std::size_t i = 0; i < list.size(); ++i) r.values(static_cast<Eigen::Index>(i)) *= distinct_count(list[i]);
    return r;
  };
  Gen g(42);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto p = random_nhs(2, 1, 2, g.rng);
    const auto u = random_jet(2, 1, 2, g.rng);
    worst = std::max(worst, std::abs(nh_pair(p, include_holonomic(u)) - var_pair(restrict_to_holonomic(p, doubled), u)));
  }
  EXPECT_GT(worst, 0.5);
}

TEST(Stress, ExteriorJetOfConstantTraction) {
  Gen g(43);
  const auto tau = random_traction_stress(2, 2, 3, g.rng);
  const TractionField field(2, 2, 3, SmoothMap::constant(2, tau.flatten()));
  const auto d = exterior_jet(field).at(g.point(2));
  EXPECT_EQ(max_abs(d.p.flatten()), 0.0);
  EXPECT_EQ(d.pbar.flatten(), tau.flatten());
}

TEST(Stress, EquilibriumBothWays) {
  for_all(44, 20, [](Gen& g) {
    const auto [n, m, k] = random_shape(g);
    const auto tau = random_traction_field(n, m, k, k + 1, g.rng);
    const auto b = random_body_force_field(n, m, k, k + 1, g.rng);
    const auto induced = induced_nhs(b, tau);
    const auto x = g.point(n);
    EXPECT_LE(max_abs(divergence(induced).at(x).flatten() + b.at(x).flatten()), 1e-12);
    EXPECT_LE(max_abs(p_tau(induced).at(x).flatten() - tau.at(x).flatten()), 1e-12);
    EXPECT_LE(max_abs(divergence(exterior_jet(tau)).at(x).flatten()), 1e-12);
  });
}

TEST(Stress, FullDivergenceHasEmptyPbarSlot) {
  for_all(50, 20, [](Gen& g) {
    const auto [n, m, k] = random_shape(g);
    const auto p = random_nhs_field(n, m, k, k + 1, g.rng);
    EXPECT_LE(max_abs(divergence_full(p).at(g.point(n)).pbar.flatten()), 1e-14);
  });
}

TEST(Stress, KernelElementExists) {
  for (int n = 2; n <= 3; ++n) {
    for (int k = 2; k <= 3; ++k) {
      const auto kappa = kernel_element(n, 1, k);
      EXPECT_GT(max_abs(kappa.flatten()), 0.5);
      EXPECT_LE(max_abs(restrict_to_holonomic(kappa).flatten()), 1e-14);
    }
  }
  Gen g(45);
  const auto kappa = kernel_element(2, 1, 2);
  for (int t = 0; t < 20; ++t) EXPECT_NEAR(nh_pair(kappa, include_holonomic(random_jet(2, 1, 2, g.rng))), 0.0, 1e-14);
}

TEST(Stress, LiftThenRestrict) {
  for_all(46, 40, [](Gen& g) {
    const auto [n, m, k] = random_shape(g);
    const auto s = random_var_stress(n, m, k, g.rng);
    EXPECT_LE(max_abs(restrict_to_holonomic(lift_variational(s)).flatten() - s.flatten()), 1e-14);
  });
}

TEST(Stress, ReducedExteriorJetPairsWithDerivative) {
  for_all(47, 20, [](Gen& g) {
    const auto [n, m, k] = random_shape(g);
    const auto tau = random_traction_field(n, m, k, 2, g.rng);
    const auto w = random_polynomial_map(n, m, k + 1, g.rng);
    const auto x = g.point(n);
    // d(tau . j^{k-1} w)/dx by central differences on the scalar density.
    const auto jw = jet_section(w, k - 1);
    const auto density = [&](const Eigen::VectorXd& y) {
      const Eigen::VectorXd a = tau.map.value(y), l = jw.value(y);
      const int width = graded_dimension(n, k - 1);
      Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
      for (int r = 0; r < m * width; ++r) c += l(r) * a.segment(r * n, n);
      return c;
    };
    double fd = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd p = x, q = x;
      p(i) += h;
      q(i) -= h;
      fd += (density(p)(i) - density(q)(i)) / (2 * h);
    }
    EXPECT_NEAR(var_pair(reduced_exterior_jet(tau).at(x), prolong(w, x, k)), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  });
}

TEST(Stress, ConstitutiveQuadraticIsIdentity) {
  const int n = 2, m = 1, k = 2;
  const int vars = JetPoint(n, m, k).components();
  std::vector<Expr> squares;
  for (int i = 0; i < vars; ++i) squares.push_back(Expr::constant(0.5) * Expr::variable(i) * Expr::variable(i));
  const auto phi = SmoothMap::from_expressions(vars, {Expr::sum(squares)});
  Gen g(48);
  const auto u = random_jet(n, m, k, g.rng);
  EXPECT_EQ(constitutive_var(phi, u).flatten(), u.flatten());
}

TEST(Stress, HyperTractionScalesWithFrame) {
  Gen g(49);
  const auto tau = random_traction_stress(3, 1, 2, g.rng);
  const Eigen::MatrixXd frame = Eigen::MatrixXd::NullaryExpr(3, 2, [&] { return g.real(); });
  const auto t1 = hyper_traction(tau, frame);
  const auto t2 = hyper_traction(tau, 2.0 * frame);
  EXPECT_LE(max_abs(t2.flatten() - 4.0 * t1.flatten()), 1e-13);
}

TEST(Stress, ShapeMismatchThrows) {
  EXPECT_THROW(var_pair(VariationalStress(2, 1, 2), JetPoint(2, 1, 3)), std::invalid_argument);
  EXPECT_THROW(nh_pair(NonHolStress(2, 1, 2), NonHolJetPoint(3, 1, 2)), std::invalid_argument);
}
