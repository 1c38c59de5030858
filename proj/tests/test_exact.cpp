#include <gtest/gtest.h>

#include <cmath>

#include "minratio/exact.hpp"
#include "oracles.hpp"

using namespace minratio;

namespace {

PointSet unit_square_corners() {
  return PointSet(Region::cube(2, 1.0), std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

}  // namespace

TEST(SquareFixture, FourCycleIsPerimeter) {
  const auto sol = exact_k_cycle(unit_square_corners(), 4);
  EXPECT_DOUBLE_EQ(sol.length, 4.0);
  EXPECT_EQ(sol.order.front(), 0u);
  EXPECT_TRUE(sol.optimal);
}

TEST(SquareFixture, ThreeCycleIsTwoPlusDiagonal) {
  EXPECT_DOUBLE_EQ(exact_k_cycle(unit_square_corners(), 3).length, 2.0 + std::sqrt(2.0));
}

TEST(SquareFixture, TwoCycleIsDoubledSide) { EXPECT_DOUBLE_EQ(exact_k_cycle(unit_square_corners(), 2).length, 2.0); }

TEST(SquareFixture, OriginPath) {
  const auto sol = exact_origin_path(unit_square_corners(), 3, Point({0.0, 0.0}));
  EXPECT_DOUBLE_EQ(sol.length, 2.0);
  EXPECT_EQ(sol.order.front(), 0u);
}

TEST(SquareFixture, DiagonalRatio) {
  // The corners coincide with points 0 and 2, so corner, 0, 2, corner costs sqrt 2 over three edges.
  const auto r = exact_diagonal_ratio(unit_square_corners(), Region::cube(2, 1.0));
  EXPECT_DOUBLE_EQ(r.ratio, std::sqrt(2.0) / 3.0);
  EXPECT_EQ(r.ratio, oracle::diagonal_ratio(unit_square_corners(), Region::cube(2, 1.0)));
}

TEST(ExactCycle, Errors) {
  const auto sq = unit_square_corners();
  EXPECT_THROW(exact_k_cycle(sq, 1), InvalidArgument);
  EXPECT_THROW(exact_k_cycle(sq, 5), InfeasibleError);
  const auto big = oracle::random_instance(20, 2, 5.0, 1, 0);
  try {
    exact_k_cycle(big, 5);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_EQ(e.cap(), kDefaultExactCap);
    EXPECT_NE(std::string(e.what()).find("18"), std::string::npos);
  }
}

TEST(ExactCycle, OrderIsAValidCycleOfReportedLength) {
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto pts = oracle::random_instance(8, 2, 3.0, 2, rep);
    const auto sol = exact_k_cycle(pts, 5);
    ASSERT_EQ(sol.order.size(), 5u);
    EXPECT_EQ(path_length(pts, sol.order, true), sol.length);
    EXPECT_EQ(*std::min_element(sol.order.begin(), sol.order.end()), sol.order.front());
  }
}

class OracleEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(OracleEquivalence, KCycle) {
  const std::size_t d = GetParam();
  for (std::uint64_t rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rep % 7;
    const auto pts = oracle::random_instance(n, d, 2.0, 10 + d, rep);
    for (std::size_t m = 2; m <= n; ++m) {
      ASSERT_EQ(exact_k_cycle(pts, m).length, oracle::k_cycle(pts, m)) << "n=" << n << " m=" << m;
    }
  }
}

TEST_P(OracleEquivalence, OriginPath) {
  const std::size_t d = GetParam();
  for (std::uint64_t rep = 0; rep < 60; ++rep) {
    const std::size_t n = 1 + rep % 7;
    const auto pts = oracle::random_instance(n, d, 2.0, 20 + d, rep);
    const Point origin(std::vector<double>(d, 1.0));
    for (std::size_t m = 1; m <= n; ++m) {
      const auto sol = exact_origin_path(pts, m, origin);
      ASSERT_EQ(sol.length, oracle::origin_path(pts, m, origin)) << "n=" << n << " m=" << m;
      ASSERT_EQ(sol.order.size(), m);
    }
  }
}

TEST_P(OracleEquivalence, DiagonalRatio) {
  const std::size_t d = GetParam();
  for (std::uint64_t rep = 0; rep < 60; ++rep) {
    const std::size_t n = rep % 8;
    const auto pts = oracle::random_instance(n, d, 3.0, 30 + d, rep);
    const auto region = Region::cube(d, 3.0);
    ASSERT_EQ(exact_diagonal_ratio(pts, region).ratio, oracle::diagonal_ratio(pts, region)) << "n=" << n;
    const std::size_t eta = rep % 3;
    const auto capped = exact_diagonal_ratio(pts, region, eta);
    ASSERT_LE(capped.interior.size(), eta);
    ASSERT_EQ(capped.ratio, oracle::diagonal_ratio(pts, region, eta));
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, OracleEquivalence, ::testing::Values(2u, 3u));

TEST(ExactDiagonal, EmptyInstanceIsBareDiagonal) {
  const auto region = Region::cube(2, 4.0);
  const PointSet none(region, std::vector<double>{}, {});
  const auto r = exact_diagonal_ratio(none, region);
  EXPECT_EQ(r.edges, 1u);
  EXPECT_DOUBLE_EQ(r.ratio, 4.0 * std::sqrt(2.0));
}

TEST(ExactDiagonal, TableLengthsAreNonIncreasingInCap) {
  const auto pts = oracle::random_instance(7, 2, 3.0, 4, 0);
  const auto region = Region::cube(2, 3.0);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t eta = 0; eta <= 7; ++eta) {
    const double w = exact_diagonal_ratio(pts, region, eta).ratio;
    EXPECT_LE(w, prev);
    prev = w;
  }
}

// L(m1)/m1 <= L(m2)/m2 + s sqrt(d)/m1 for m1 < m2.
TEST(CycleRatioInequality, HoldsOnExactSolutions) {
  for (std::size_t d : {2u, 3u}) {
    for (std::uint64_t rep = 0; rep < 30; ++rep) {
      const double s = 1.0 + rep % 4;
      const auto pts = oracle::random_instance(9, d, s, 40 + d, rep);
      std::vector<double> L(10, 0.0);
      for (std::size_t m = 2; m <= 9; ++m) L[m] = exact_k_cycle(pts, m).length;
      for (std::size_t m1 = 2; m1 <= 9; ++m1) {
        for (std::size_t m2 = m1 + 1; m2 <= 9; ++m2) {
          EXPECT_LE(L[m1] / m1, L[m2] / m2 + s * std::sqrt(double(d)) / m1 + 1e-12);
        }
      }
    }
  }
}

// L(n) <= (2 sqrt d + 2^{d-1}) s n^{(d-1)/d} for n points in [0, s]^d.
TEST(CycleLengthBound, HoldsOnExactSolutions) {
  for (std::size_t d : {2u, 3u}) {
    const double a1 = 2.0 * std::sqrt(double(d)) + std::pow(2.0, double(d) - 1.0);
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
      const std::size_t n = 2 + rep % 11;
      const double s = 0.5 + rep % 5;
      const auto pts = oracle::random_instance(n, d, s, 50 + d, rep);
      EXPECT_LE(exact_k_cycle(pts, n).length, a1 * s * std::pow(double(n), (double(d) - 1.0) / double(d)));
    }
  }
}
