#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "generators.hpp"
#include "jetstress/multiindex.hpp"

using namespace jetstress;
using jetstress::testing::for_all;
using jetstress::testing::Gen;

TEST(MultiIndex, CountMatchesClosedForm) {
  for (int n = 1; n <= 5; ++n) {
    for (int l = 0; l <= 5; ++l) {
      EXPECT_EQ(static_cast<std::int64_t>(enumerate(n, l).size()), binomial(n + l - 1, l)) << n << " " << l;
      EXPECT_EQ(symmetric_dimension(n, l), binomial(n + l - 1, l));
    }
  }
}

TEST(MultiIndex, BinomialSmallTable) {
  EXPECT_EQ(binomial(0, 0), 1);
  EXPECT_EQ(binomial(5, 2), 10);
  EXPECT_EQ(binomial(8, 4), 70);
  EXPECT_EQ(binomial(3, 5), 0);
}

TEST(MultiIndex, MultiplicitiesPartitionSequences) {
  for (int n = 1; n <= 4; ++n) {
    for (int l = 0; l <= 5; ++l) {
      std::int64_t total = 0;
      for (const auto& index : enumerate(n, l)) total += multiplicity(index);
      std::int64_t expected = 1;
      for (int i = 0; i < l; ++i) expected *= n;
      EXPECT_EQ(total, expected);
    }
  }
}

TEST(MultiIndex, CanonicalOrderIsDescendingLex) {
  const auto list = enumerate(3, 2);
  ASSERT_EQ(list.size(), 6u);
  EXPECT_EQ(list.front(), MultiIndex({2, 0, 0}));
  EXPECT_EQ(list[1], MultiIndex({1, 1, 0}));
  EXPECT_EQ(list.back(), MultiIndex({0, 0, 2}));
  for (std::size_t i = 1; i < list.size(); ++i) EXPECT_GT(list[i - 1].counts(), list[i].counts());
}

TEST(MultiIndex, GradedRankIsPositionInGradedList) {
  for (int n = 1; n <= 4; ++n) {
    const auto all = enumerate_up_to(n, 4);
    ASSERT_EQ(static_cast<int>(all.size()), graded_dimension(n, 4));
    for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(graded_rank(all[i]), static_cast<int>(i));
  }
}

TEST(MultiIndex, SequenceRoundTripProperty) {
  for_all(11, 300, [](Gen& g) {
    const int n = g.integer(1, 4);
    const auto index = g.multiindex(n, g.integer(0, 6));
    auto seq = index.sequence();
    EXPECT_EQ(static_cast<int>(seq.size()), degree(index));
    EXPECT_TRUE(std::is_sorted(seq.begin(), seq.end()));
    std::shuffle(seq.begin(), seq.end(), g.rng);
    EXPECT_EQ(MultiIndex::from_sequence(n, seq), index);
  });
}

TEST(MultiIndex, AppendRemoveProperty) {
  for_all(12, 300, [](Gen& g) {
    const int n = g.integer(1, 4);
    const auto index = g.multiindex(n, g.integer(0, 5));
    const int j = g.integer(0, n - 1);
    const auto longer = append(index, j);
    EXPECT_EQ(degree(longer), degree(index) + 1);
    EXPECT_EQ(remove(longer, j), index);
    // |I + e_j|!/(I + e_j)! = sum over where the extra slot goes.
    EXPECT_EQ(multiplicity(longer) * (index[j] + 1), multiplicity(index) * (degree(index) + 1));
  });
}

TEST(MultiIndex, FactorialAndDistinctCount) {
  EXPECT_EQ(factorial(MultiIndex({2, 3})), 12);
  EXPECT_EQ(multiplicity(MultiIndex({2, 1})), 3);
  EXPECT_EQ(distinct_count(MultiIndex({2, 0, 1})), 2);
  EXPECT_EQ(distinct_count(MultiIndex(3)), 0);
}

TEST(MultiIndex, RejectsInvalidInput) {
  EXPECT_THROW(MultiIndex({1, -1}), std::invalid_argument);
  EXPECT_THROW(remove(MultiIndex({0, 1}), 0), std::invalid_argument);
  const std::vector<int> bad{0, 3};
  EXPECT_THROW(MultiIndex::from_sequence(2, bad), std::out_of_range);
}
