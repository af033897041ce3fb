#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "varw/errors.hpp"
#include "varw/stats.hpp"

namespace varw {
namespace {

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.9), 3.7);
  EXPECT_DOUBLE_EQ(median({5.0, 1.0, 3.0}), 3.0);
}

TEST(ChiSquareSf, KnownValues) {
  EXPECT_NEAR(chi_square_sf(3.841458820694124, 1), 0.05, 1e-12);
  EXPECT_NEAR(chi_square_sf(2.0, 2), std::exp(-1.0), 1e-14);
  EXPECT_DOUBLE_EQ(chi_square_sf(0.0, 3), 1.0);
}

TEST(Contingency, HandComputed) {
  // Expected counts are all 15; statistic = 4 * 25 / 15.
  const auto r = contingency_chi_square({{10, 20}, {20, 10}});
  EXPECT_NEAR(r.statistic, 100.0 / 15.0, 1e-12);
  EXPECT_EQ(r.dof, 1u);
  EXPECT_NEAR(r.p_value, chi_square_sf(100.0 / 15.0, 1), 1e-15);
}

TEST(Contingency, IgnoresEmptyColumns) {
  const auto r = contingency_chi_square({{10, 0, 20}, {20, 0, 10}});
  EXPECT_EQ(r.bins, 2u);
  EXPECT_NEAR(r.statistic, 100.0 / 15.0, 1e-12);
}

TEST(TwoSample, IdenticalSamplesHavePValueOne) {
  std::vector<std::int64_t> a;
  for (int i = 0; i < 500; ++i) a.push_back(i % 7);
  const auto r = two_sample_chi_square(a, a);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  EXPECT_EQ(r.bins, 7u);
}

TEST(TwoSample, PoolsSparseTail) {
  std::vector<std::int64_t> a(100, 0), b(100, 0);
  a.push_back(50);  // lone outlier must be pooled into a neighbour
  b.push_back(60);
  const auto r = two_sample_chi_square(a, b);
  EXPECT_EQ(r.bins, 1u);
  EXPECT_EQ(r.dof, 0u);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(TwoSample, DetectsShift) {
  std::mt19937_64 rng(5);
  std::poisson_distribution<int> p3(3.0), p4(4.0);
  std::vector<std::int64_t> a, b;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(p3(rng));
    b.push_back(p4(rng));
  }
  EXPECT_LT(two_sample_chi_square(a, b).p_value, 1e-6);
}

TEST(TwoSample, SameDistributionIsAccepted) {
  std::mt19937_64 rng(6);
  std::poisson_distribution<int> p3(3.0);
  std::vector<std::int64_t> a, b;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(p3(rng));
    b.push_back(p3(rng));
  }
  EXPECT_GT(two_sample_chi_square(a, b).p_value, 0.001);
}

TEST(TwoSample, TooFewSamples) {
  const std::vector<std::int64_t> a{1, 2, 3};
  const std::vector<std::int64_t> b{1, 2, 3, 4, 5, 6};
  EXPECT_THROW(two_sample_chi_square(a, b), ModelError);
}

}  // namespace
}  // namespace varw
