#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "jetstress/measure.hpp"

using namespace jetstress;
using jetstress::testing::for_all;
using jetstress::testing::Gen;

namespace {

double factorial(int v) {
  double f = 1;
  for (int i = 2; i <= v; ++i) f *= i;
  return f;
}

}  // namespace

TEST(Measure, GaussLegendreIntegratesOddDegreeExactly) {
  for (int p = 1; p <= 10; ++p) {
    const auto rule = gauss_legendre(p);
    for (int d = 0; d <= 2 * p - 1; ++d) {
      double q = 0.0;
      for (Eigen::Index i = 0; i < rule.weights.size(); ++i) q += rule.weights(i) * std::pow(rule.nodes(0, i), d);
      EXPECT_NEAR(q, 1.0 / (d + 1), 1e-14) << p << " " << d;
    }
  }
}

TEST(Measure, SimplexMonomialsMatchDirichletFormula) {
  for_all(61, 40, [](Gen& g) {
    const int n = g.integer(1, 3);
    std::vector<int> a(static_cast<std::size_t>(n));
    int total = 0;
    double expected = 1.0;
    for (auto& e : a) {
      e = g.integer(0, 4);
      total += e;
      expected *= factorial(e);
    }
    expected /= factorial(n + total);
    const double q = integrate_n_form(
        [&](const Eigen::VectorXd& x) {
          double v = 1.0;
          for (int i = 0; i < n; ++i) v *= std::pow(x(i), a[static_cast<std::size_t>(i)]);
          return v;
        },
        Region::unit_simplex(n), total);
    EXPECT_NEAR(q, expected, 1e-14);
  });
}

TEST(Measure, MappedSimplexVolume) {
  std::vector<Eigen::VectorXd> v(3, Eigen::VectorXd::Zero(2));
  v[1] << 2.0, 0.0;
  v[2] << 0.5, 3.0;
  const auto region = Region::simplex(v);
  EXPECT_NEAR(region.volume(), 3.0, 1e-15);
  EXPECT_NEAR(integrate_n_form([](const Eigen::VectorXd&) { return 1.0; }, region, 1), 3.0, 1e-14);
}

TEST(Measure, OrientationSelfTest) { EXPECT_TRUE(orientation_self_test()); }

TEST(Measure, DivergenceTheoremForVectorFields) {
  // c = (x1^2 x2, x2 x3, x1) in 3D: div c = 2 x1 x2 + x3.
  const auto c = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd v(3);
    v << x(0) * x(0) * x(1), x(1) * x(2), x(0);
    return v;
  };
  const auto div = [](const Eigen::VectorXd& x) { return 2 * x(0) * x(1) + x(2); };
  for (const auto& region : {Region::unit_box(3), Region::unit_simplex(3)}) {
    EXPECT_NEAR(integrate_boundary_form(c, region, 4), integrate_n_form(div, region, 4), 1e-14);
  }
}

TEST(Measure, StokesForRandomTractions) {
  for_all(62, 6, [](Gen& g) {
    const int n = g.integer(2, 3), m = 1, k = g.integer(1, 3);
    const auto tau = random_traction_field(n, m, k, 2, g.rng);
    const auto lambda = random_polynomial_map(n, m * graded_dimension(n, k - 1), 2, g.rng);
    EXPECT_LE(stokes_residual(tau, lambda, Region::unit_box(n), 6), 1e-10);
    EXPECT_LE(stokes_residual(tau, lambda, Region::unit_simplex(n), 6), 1e-10);
  });
}

TEST(Measure, PairwiseSumIsAccurate) {
  std::vector<double> v(1 << 16, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 6553.6, 1e-9);
}

TEST(Measure, BoxFacesHaveOutwardOrientation) {
  const auto region = Region::unit_box(2);
  const auto faces = region.faces();
  ASSERT_EQ(faces.size(), 4u);
  for (const auto& f : faces) EXPECT_TRUE(f.sign == 1 || f.sign == -1);
}
