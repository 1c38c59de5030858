#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "minratio/bounds.hpp"

using namespace minratio;

TEST(UnitBall, KnownVolumes) {
  EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 / 3.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(4), std::numbers::pi * std::numbers::pi / 2.0, 1e-14);
}

TEST(LowerBound, PlaneValue) {
  const auto b = brw_lower_bound(2);
  EXPECT_NEAR(b.value, 1.0 / (2.0 * std::numbers::pi * std::numbers::e), 1e-12);
  EXPECT_NEAR(b.auxiliary.at("lambda_star"), 2.0 * std::numbers::pi * std::numbers::e, 1e-9);
  EXPECT_EQ(b.direction, BoundDirection::lower);
  EXPECT_EQ(b.derivation, Derivation::closed_form);
}

class LowerBoundIdentity : public ::testing::TestWithParam<int> {};

TEST_P(LowerBoundIdentity, OptimalityConditionHolds) {
  const int d = GetParam();
  const auto b = brw_lower_bound(d);
  const double lambda = b.auxiliary.at("lambda_star");
  const double lhs = std::exp(lambda * b.value) * unit_ball_volume(d) * std::tgamma(d + 1.0) / std::pow(lambda, d - 1);
  EXPECT_NEAR(lhs, 1.0, 1e-9);
  EXPECT_GT(b.value, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Dims, LowerBoundIdentity, ::testing::Range(2, 11));

TEST(LowerBound, RejectsLowDimension) { EXPECT_THROW(brw_lower_bound(1), InvalidArgument); }

TEST(UpperBound, PicksSmallestNormalisedMean) {
  std::vector<FiniteSizeSample> samples{{2.0, 1.0, {3.0, 3.2, 2.8}, false}, {4.0, 1.0, {11.0, 11.5, 12.0}, true}};
  const auto b = finite_s_upper_bound(samples, 2, 0.95);
  EXPECT_NEAR(b.value, 11.5 / 16.0, 1e-12);
  EXPECT_EQ(b.auxiliary.at("s"), 4.0);
  EXPECT_NEAR(b.auxiliary.at("ci_half_width"), 1.6448536 * (0.5 / std::sqrt(3.0)) / 16.0, 1e-6);
  EXPECT_EQ(b.auxiliary.at("heuristic"), 1.0);
  EXPECT_EQ(b.direction, BoundDirection::upper);
}

TEST(UpperBound, Errors) {
  EXPECT_THROW(finite_s_upper_bound({}, 2), InvalidArgument);
  EXPECT_THROW(finite_s_upper_bound({{2.0, 1.0, {1.0}, false}}, 2), InvalidArgument);
  EXPECT_THROW(finite_s_upper_bound({{2.0, 1.0, {1.0, 2.0}, false}}, 2, 1.5), InvalidArgument);
}

TEST(Gamma, IntegerAndHalfIntegerValues) {
  double factorial = 1.0;
  for (int k = 1; k <= 12; ++k) {
    EXPECT_NEAR(std::tgamma(k + 1.0), factorial * k, 1e-13 * factorial * k);
    factorial *= k;
  }
  double half = std::sqrt(std::numbers::pi);  // Gamma(1/2)
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(std::tgamma(k + 0.5), half, 1e-13 * half);
    half *= k + 0.5;
  }
}
