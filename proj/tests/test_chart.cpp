#include <gtest/gtest.h>

#include "generators.hpp"
#include "jetstress/chart.hpp"

using namespace jetstress;
using jetstress::testing::for_all;
using jetstress::testing::Gen;

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Box unit(int n) { return Box{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)}; }

ChartMap parabola_chart() {
  const Expr x1 = Expr::variable(0), x2 = Expr::variable(1);
  return ChartMap(SmoothMap::from_expressions(2, {x1 + x2 * x2, x2}), SmoothMap::from_expressions(2, {x1 - x2 * x2, x2}),
                  Box{Eigen::VectorXd::Constant(2, -2.0), Eigen::VectorXd::Constant(2, 2.0)});
}

}  // namespace

TEST(Chart, TriangularChartsRoundTrip) {
  for_all(51, 20, [](Gen& g) {
    const int n = g.integer(1, 4);
    const auto chart = random_triangular_chart(n, g.rng, unit(n));
    std::vector<Eigen::VectorXd> samples;
    for (int i = 0; i < 5; ++i) samples.push_back(g.point(n));
    EXPECT_LE(chart.round_trip_residual(samples, 3), 1e-9);
  });
}

TEST(Chart, ParabolaHasUnitJacobian) {
  const auto chart = parabola_chart();
  Eigen::VectorXd x(2);
  x << 0.3, 0.7;
  EXPECT_NEAR(chart.jacobian_determinant(x), 1.0, 1e-15);
  EXPECT_NEAR(chart.to_target(x)(0), 0.79, 1e-15);
}

TEST(Chart, GMatchesTransformedSectionJet) {
  for_all(52, 20, [](Gen& g) {
    const int n = g.integer(1, 3), m = g.integer(1, 2), k = g.integer(1, 3);
    const auto chart = random_triangular_chart(n, g.rng, unit(n));
    const auto a = random_unipotent_transition(n, m, g.rng);
    const auto w = random_polynomial_map(n, m, k + 1, g.rng);
    const auto x = g.point(n);
    const auto u = prolong(w, x, k);
    const auto expected = prolong(transform_section(chart, a, w), chart.to_target(x), k);
    EXPECT_LE(max_abs(assemble_G(chart, a, x, m, k) * u.flatten() - expected.flatten()), 1e-9);
  });
}

TEST(Chart, GIsBlockLowerTriangularInOrder) {
  Gen g(53);
  const int n = 2, m = 1, k = 3;
  const auto chart = random_triangular_chart(n, g.rng, unit(n));
  const auto a = random_unipotent_transition(n, m, g.rng);
  const auto all = enumerate_up_to(n, k);
  const auto G = assemble_G(chart, a, g.point(n), m, k);
  for (int r = 0; r < G.rows(); ++r) {
    for (int c = 0; c < G.cols(); ++c) {
      if (degree(all[static_cast<std::size_t>(c)]) > degree(all[static_cast<std::size_t>(r)])) EXPECT_EQ(G(r, c), 0.0);
    }
  }
}

TEST(Chart, PairingInvariance) {
  for_all(54, 20, [](Gen& g) {
    const int n = g.integer(2, 3), m = g.integer(1, 2), k = g.integer(1, 3);
    const auto chart = random_triangular_chart(n, g.rng, unit(n));
    const auto a = random_unipotent_transition(n, m, g.rng);
    const auto x = g.point(n);
    const double jac = chart.jacobian_determinant(x);
    const auto u = random_jet(n, m, k, g.rng);
    const auto up = transform_jet(chart, a, u, x);
    const auto sp = random_var_stress(n, m, k, g.rng);
    EXPECT_NEAR(var_pair(pushforward_var_stress(chart, a, sp, x), u), jac * var_pair(sp, up), 1e-9);
    const auto pp = random_nhs(n, m, k, g.rng);
    const auto q = random_nonholonomic_jet(n, m, k, g.rng);
    EXPECT_NEAR(nh_pair(pushforward_nhs(chart, a, pp, x), q),
                jac * nh_pair(pp, transform_nonholonomic(chart, a, q, x)), 1e-9);
  });
}

TEST(Chart, TractionPushforwardKeepsTheBoundaryForm) {
  for_all(55, 20, [](Gen& g) {
    const int n = g.integer(2, 3), m = 1, k = g.integer(1, 3);
    const auto chart = random_triangular_chart(n, g.rng, unit(n));
    const auto a = random_unipotent_transition(n, m, g.rng);
    const auto x = g.point(n);
    const auto v = random_jet(n, m, k - 1, g.rng);
    const auto taup = random_traction_stress(n, m, k, g.rng);
    const Eigen::MatrixXd frame = Eigen::MatrixXd::NullaryExpr(n, n - 1, [&] { return g.real(); });
    const double lhs = evaluate_on_frame(traction_action(pushforward_traction_stress(chart, a, taup, x), v), frame);
    const double rhs =
        evaluate_on_frame(traction_action(taup, transform_jet(chart, a, v, x)), chart.forward().jacobian(x) * frame);
    EXPECT_NEAR(lhs, rhs, 1e-9);
  });
}

TEST(Chart, LinearChartKeepsTractionSymmetry) {
  Eigen::MatrixXd l(2, 2);
  l << 2.0, 1.0, 0.0, 1.0;
  const auto chart = ChartMap::affine(l, Eigen::VectorXd::Zero(2), Box{Eigen::VectorXd::Constant(2, -1), Eigen::VectorXd::Constant(2, 1)});
  TractionStress t(2, 1, 2);
  t(0, MultiIndex({1, 0}), 1) = 1.0;
  t(0, MultiIndex({0, 1}), 0) = 1.0;
  const auto pushed = pushforward_traction_stress(chart, BundleTransition::identity(2, 1), t, Eigen::VectorXd::Zero(2));
  EXPECT_NEAR(pushed(0, MultiIndex({1, 0}), 1), pushed(0, MultiIndex({0, 1}), 0), 1e-15);
}

TEST(Chart, PointsOutsideTheBoxAreRejected) {
  const auto chart = parabola_chart();
  EXPECT_THROW(chart.check_point(Eigen::VectorXd::Constant(2, 3.0)), std::out_of_range);
}
