#include <gtest/gtest.h>

#include <cmath>

#include "minratio/stats.hpp"

using namespace minratio;

TEST(Moments, MatchesTwoPassFormulas) {
  const std::vector<double> xs{1.5, 2.0, -3.0, 4.25, 0.0, 7.0};
  const auto m = moments_of(xs);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  EXPECT_EQ(m.count(), xs.size());
  EXPECT_NEAR(m.mean(), mean, 1e-12);
  EXPECT_NEAR(m.variance(), ss / (xs.size() - 1), 1e-12);
  EXPECT_NEAR(m.stderr_of_mean(), std::sqrt(ss / (xs.size() - 1) / xs.size()), 1e-12);
}

TEST(Moments, MergeEqualsConcatenation) {
  const std::vector<double> a{1, 2, 3, 10}, b{-1, 5, 8};
  auto ma = moments_of(a);
  ma.merge(moments_of(b));
  std::vector<double> all = a;
  all.insert(all.end(), b.begin(), b.end());
  const auto mall = moments_of(all);
  EXPECT_NEAR(ma.mean(), mall.mean(), 1e-12);
  EXPECT_NEAR(ma.variance(), mall.variance(), 1e-12);
}

TEST(Moments, SingleValueHasZeroVariance) {
  const std::vector<double> one{3.0};
  EXPECT_EQ(moments_of(one).variance(), 0.0);
}

TEST(NormalQuantile, KnownValues) {
  EXPECT_NEAR(normal_upper_quantile(0.025), 1.959963985, 1e-7);
  EXPECT_NEAR(normal_upper_quantile(0.01), 2.326347874, 1e-7);
  EXPECT_NEAR(normal_upper_quantile(0.5), 0.0, 1e-9);
}
