#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "minratio/exact.hpp"
#include "minratio/search.hpp"
#include "oracles.hpp"

using namespace minratio;

TEST(LocalSearchCycle, NeverBeatsExactAndUsuallyMatches) {
  std::size_t matched = 0, total = 0;
  for (std::uint64_t rep = 0; rep < 40; ++rep) {
    const std::size_t n = 10 + rep % 7;
    const auto pts = oracle::random_instance(n, 2, 4.0, 60, rep);
    for (std::size_t m : {3ul, n / 2, n}) {
      SearchOptions o;
      o.stream = {60, rep, substream::kSearch};
      const auto h = local_search_k_cycle(pts, m, o);
      const auto e = exact_k_cycle(pts, m);
      ASSERT_EQ(h.order.size(), m);
      EXPECT_EQ(std::set<std::size_t>(h.order.begin(), h.order.end()).size(), m);
      EXPECT_NEAR(path_length(pts, h.order, true), h.length, 1e-9);
      EXPECT_GE(h.length, e.length - 1e-9);
      matched += h.length <= e.length + 1e-9;
      ++total;
    }
  }
  EXPECT_GE(matched * 10, total * 9);
}

TEST(LocalSearchCycle, DeterministicForAStream) {
  const auto pts = oracle::random_instance(200, 2, 14.0, 61, 0);
  SearchOptions o;
  o.stream = {61, 0, substream::kSearch};
  EXPECT_EQ(local_search_k_cycle(pts, 80, o).order, local_search_k_cycle(pts, 80, o).order);
}

TEST(LocalSearchCycle, Errors) {
  const auto pts = oracle::random_instance(5, 2, 1.0, 62, 0);
  EXPECT_THROW(local_search_k_cycle(pts, 2), InvalidArgument);
  EXPECT_THROW(local_search_k_cycle(pts, 6), InfeasibleError);
  SearchOptions none;
  none.two_opt = none.or_opt = none.swap = false;
  EXPECT_THROW(local_search_k_cycle(pts, 4, none), InvalidArgument);
}

TEST(GreedyDiagonal, PicksOnePointPerNonemptyDiagonalCube) {
  const auto region = Region::cube(2, 3.5);
  const PointSet pts(region, std::vector<Point>{{0.5, 0.5}, {0.2, 0.9}, {1.0, 1.0}, {2.5, 1.5}, {3.2, 3.4}, {2.0, 2.99}});
  const auto g = greedy_diagonal(pts, region);
  // cube [0,1)^2 -> 0, [1,2)^2 -> 2, [2,3)^2 -> 5; the partial cube [3,3.5] is not walked.
  EXPECT_EQ(g.interior, (std::vector<std::size_t>{0, 2, 5}));
  EXPECT_EQ(g.edges, 4u);
  EXPECT_EQ(g.start, region.lower());
  EXPECT_EQ(g.end, region.upper());
}

TEST(GreedyDiagonal, LengthBound) {
  for (std::size_t d : {2u, 3u, 4u}) {
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
      const double s = 1.0 + 0.37 * rep;
      const auto region = Region::cube(d, s);
      const auto pts = sample_poisson(region, d == 2 ? 1.0 : 0.3, 70, rep);
      const auto g = greedy_diagonal(pts, region);
      EXPECT_LE(g.length, greedy_length_constant(d) * std::ceil(s));
    }
  }
}

TEST(Concatenate, DropsSharedCornersAndShortens) {
  for (std::uint64_t rep = 0; rep < 30; ++rep) {
    const std::size_t k = 2 + rep % 4;
    std::vector<Region> layout;
    std::vector<RatioPath> parts;
    std::vector<PointSet> clouds;
    for (std::size_t i = 0; i < k; ++i) {
      const double side = 1.0 + 0.5 * static_cast<double>((rep + i) % 3);
      const Point lower = i == 0 ? Point({0.0, 0.0}) : layout.back().upper();
      layout.push_back(Region::cube(lower, side));
      clouds.push_back(sample_poisson(layout.back(), 2.0, 80 + i, rep));
    }
    double total = 0.0;
    std::size_t edges = 0;
    for (std::size_t i = 0; i < k; ++i) {
      parts.push_back(exact_diagonal_ratio(clouds[i], layout[i], 6));
      total += parts.back().length;
      edges += parts.back().edges;
    }
    const auto joined = concatenate_paths(parts, layout);
    EXPECT_EQ(joined.edges, edges - (k - 1));
    EXPECT_LE(joined.length, total + 1e-12);
    EXPECT_EQ(joined.start, layout.front().lower());
    EXPECT_EQ(joined.end, layout.back().upper());
  }
}

TEST(Concatenate, RejectsGaps) {
  const auto a = Region::cube(2, 1.0);
  const auto b = Region::cube(Point({1.5, 1.5}), 1.0);
  const PointSet none_a(a, std::vector<double>{}, {});
  const PointSet none_b(b, std::vector<double>{}, {});
  const std::vector<RatioPath> parts{exact_diagonal_ratio(none_a, a), exact_diagonal_ratio(none_b, b)};
  const std::vector<Region> layout{a, b};
  EXPECT_THROW(concatenate_paths(parts, layout), InvalidArgument);
}

TEST(Dinkelbach, ExactInnerMatchesExactRatio) {
  for (std::size_t d : {2u, 3u}) {
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
      const std::size_t n = rep % 10;
      const double s = 2.0 + rep % 3;
      const auto region = Region::cube(d, s);
      const auto pts = oracle::random_instance(n, d, s, 90 + d, rep);
      const auto res = dinkelbach_search(pts, region);
      ASSERT_TRUE(res.exact_inner);
      EXPECT_EQ(res.path.ratio, exact_diagonal_ratio(pts, region).ratio);
      for (std::size_t i = 1; i < res.trace.size(); ++i) EXPECT_LT(res.trace[i].c, res.trace[i - 1].c);
      EXPECT_GE(res.terminal_transform, -1e-9);
    }
  }
}

TEST(Dinkelbach, HeuristicInnerIsAnUpperBound) {
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    const auto region = Region::cube(2, 3.5);
    const auto pts = sample_poisson(region, 1.0, 95, rep);
    if (pts.size() > 16) continue;
    SearchOptions o;
    o.allow_exact_inner = false;
    o.stream = {95, rep, substream::kSearch};
    const auto h = dinkelbach_search(pts, region, std::nullopt, o);
    EXPECT_FALSE(h.exact_inner);
    EXPECT_GE(h.path.ratio, exact_diagonal_ratio(pts, region).ratio - 1e-12);
    EXPECT_NEAR(h.path.ratio, h.path.length / h.path.edges, 1e-12);
  }
}

TEST(Dinkelbach, RespectsInteriorCap) {
  const auto region = Region::cube(2, 8.0);
  const auto pts = sample_poisson(region, 1.0, 96, 0);
  SearchOptions o;
  o.allow_exact_inner = false;
  const auto h = dinkelbach_search(pts, region, 4, o);
  EXPECT_LE(h.path.interior.size(), 4u);
}

TEST(Oriented, MatchesBruteForce) {
  for (std::uint64_t rep = 0; rep < 60; ++rep) {
    const std::size_t n = rep % 8;
    const auto region = Region::cube(2, 3.0);
    const auto pts = oracle::random_instance(n, 2, 3.0, 97, rep);
    const auto res = oriented_path_search(pts, region);
    EXPECT_DOUBLE_EQ(res.path.ratio, oracle::diagonal_ratio(pts, region, std::nullopt, true));
    double prev = -1.0;
    for (const auto& v : res.path.vertices) {
      EXPECT_GT(v[1], prev);
      prev = v[1];
    }
  }
}

TEST(Oriented, RequiresPlane) {
  const auto region = Region::cube(3, 2.0);
  const PointSet none(region, std::vector<double>{}, {});
  EXPECT_THROW(oriented_path_search(none, region), UnsupportedDimension);
}

TEST(OriginPath, BranchAndBoundMatchesExact) {
  for (std::uint64_t rep = 0; rep < 30; ++rep) {
    const auto pts = oracle::random_instance(12, 2, 4.0, 98, rep);
    const Point origin({2.0, 2.0});
    for (std::size_t m : {1ul, 3ul, 6ul}) {
      const auto bb = branch_and_bound_origin_path(pts, m, origin);
      ASSERT_TRUE(bb.has_value());
      EXPECT_EQ(bb->length, exact_origin_path(pts, m, origin).length);
      EXPECT_TRUE(bb->optimal);
      const auto h = heuristic_origin_path(pts, m, origin);
      EXPECT_GE(h.length, bb->length - 1e-12);
      EXPECT_EQ(h.order.size(), m);
    }
  }
}

TEST(OriginPath, BudgetExhaustionReturnsNothing) {
  const auto pts = oracle::random_instance(40, 2, 6.0, 99, 0);
  EXPECT_FALSE(branch_and_bound_origin_path(pts, 20, Point({3.0, 3.0}), 10).has_value());
}
