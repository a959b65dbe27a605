#pragma once

// Hand-rolled property generators: each property runs over `trials` cases
// drawn from a seeded engine, and failures report the trial number.

#include <gtest/gtest.h>

#include <Eigen/Core>
#include <cstdint>
#include <random>

#include "jetstress/random_fields.hpp"

namespace jetstress::testing {

struct Gen {
  Rng rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  Eigen::VectorXd vector(Eigen::Index size, double lo = -1.0, double hi = 1.0) {
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = real(lo, hi);
    return v;
  }
  Eigen::VectorXd point(int n) { return vector(n, 0.0, 1.0); }
  MultiIndex multiindex(int n, int l) {
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < l; ++i) ++counts[static_cast<std::size_t>(integer(0, n - 1))];
    return MultiIndex(counts);
  }
};

template <typename Property>
void for_all(std::uint64_t seed, int trials, Property property) {
  Gen gen(seed);
  for (int t = 0; t < trials; ++t) {
    SCOPED_TRACE("trial " + std::to_string(t) + " seed " + std::to_string(seed));
    property(gen);
    if (::testing::Test::HasFatalFailure()) return;
  }
}

}  // namespace jetstress::testing
