#include <gtest/gtest.h>

#include "generators.hpp"
#include "jetstress/symalg.hpp"

using namespace jetstress;
using jetstress::testing::for_all;
using jetstress::testing::Gen;

namespace {

AlmostSymArray random_almost(Gen& g, int n, int l) {
  return AlmostSymArray(n, l, Eigen::MatrixXd::NullaryExpr(symmetric_dimension(n, l - 1), n, [&] { return g.real(); }));
}

SymArray random_sym(Gen& g, int n, int l, Convention c) {
  return SymArray(n, l, c, g.vector(symmetric_dimension(n, l)));
}

}  // namespace

TEST(SymAlg, CollapseAfterSpreadIsIdentity) {
  for_all(21, 500, [](Gen& g) {
    const int n = g.integer(1, 4), l = g.integer(1, 4);
    const auto r = random_sym(g, n, l, Convention::dual);
    EXPECT_LE((collapse_last(spread_last(r)).values - r.values).cwiseAbs().maxCoeff(), 1e-14);
  });
}

TEST(SymAlg, PairingTransfer) {
  for_all(22, 500, [](Gen& g) {
    const int n = g.integer(1, 4), l = g.integer(1, 4);
    const auto t = random_almost(g, n, l);
    const auto w = random_sym(g, n, l, Convention::derivative);
    double lhs = 0.0;
    for (const auto& head : enumerate(n, l - 1)) {
      for (int j = 0; j < n; ++j) lhs += t(head, j) * w(append(head, j));
    }
    EXPECT_NEAR(lhs, pair(collapse_last(t), w), 1e-12);
  });
}

TEST(SymAlg, CollapseOfExtensionCountsDistinctSlots) {
  for_all(23, 200, [](Gen& g) {
    const int n = g.integer(1, 4), l = g.integer(1, 4);
    const auto r = random_sym(g, n, l, Convention::dual);
    const auto back = collapse_last(extend_symmetric(r));
    const auto list = enumerate(n, l);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto e = static_cast<Eigen::Index>(i);
      EXPECT_NEAR(back.values(e), distinct_count(list[i]) * r.values(e), 1e-14);
    }
  });
}

TEST(SymAlg, SymmetrizeAlmostAgreesWithFullSymmetrization) {
  for_all(24, 200, [](Gen& g) {
    const int n = g.integer(1, 3), l = g.integer(1, 4);
    const auto t = random_almost(g, n, l);
    const RawArray raw = [&](std::span<const int> s) { return t.at_sequence(s); };
    EXPECT_LE((symmetrize_almost(t).values - symmetrize(raw, n, l).values).cwiseAbs().maxCoeff(), 1e-14);
  });
}

TEST(SymAlg, SymmetricDataIsUnchangedBySymmetrization) {
  for_all(25, 100, [](Gen& g) {
    const int n = g.integer(1, 3), l = g.integer(1, 4);
    const auto r = random_sym(g, n, l, Convention::derivative);
    const RawArray raw = [&](std::span<const int> s) { return r.at_sequence(s); };
    EXPECT_LE((symmetrize(raw, n, l).values - r.values).cwiseAbs().maxCoeff(), 1e-14);
  });
}

TEST(SymAlg, PairRequiresMatchingConventions) {
  const SymArray a(2, 2, Convention::dual), b(2, 2, Convention::dual), c(2, 3, Convention::derivative);
  EXPECT_THROW(pair(a, b), std::invalid_argument);
  EXPECT_THROW(pair(a, c), std::invalid_argument);
}

TEST(SymAlg, DualPairingMatchesDenseSum) {
  // T^I w_I = sum over sequences of (T^<seq> / mult) w_seq for n = 2, l = 3.
  const int n = 2, l = 3;
  Gen g(26);
  const auto t = random_sym(g, n, l, Convention::dual);
  const auto w = random_sym(g, n, l, Convention::derivative);
  double dense = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const std::vector<int> seq{a, b, c};
        const auto index = MultiIndex::from_sequence(n, seq);
        dense += t(index) / static_cast<double>(multiplicity(index)) * w(index);
      }
    }
  }
  EXPECT_NEAR(dense, pair(t, w), 1e-14);
}
