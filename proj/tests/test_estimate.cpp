#include <gtest/gtest.h>

#include <cmath>

#include "minratio/estimate.hpp"
#include "oracles.hpp"

using namespace minratio;

TEST(Fractions, IntegerGuard) {
  EXPECT_EQ(ceil_fraction(0.3, 10.0), 3u);
  EXPECT_EQ(ceil_fraction(0.7, 10.0), 7u);
  EXPECT_EQ(ceil_fraction(0.25, 10.0), 3u);
  EXPECT_EQ(floor_fraction(0.3, 10.0), 3u);
  EXPECT_EQ(floor_fraction(0.25, 10.0), 2u);
}

TEST(SolveKCycle, SmallM) {
  const PointSet pts(Region::cube(2, 3.0), std::vector<Point>{{0, 0}, {3, 0}, {1, 1}, {1, 1.5}});
  EXPECT_EQ(solve_k_cycle(pts, 1, SolverPolicy::automatic, {}, 18).length, 0.0);
  EXPECT_DOUBLE_EQ(solve_k_cycle(pts, 2, SolverPolicy::automatic, {}, 18).length, 1.0);
  EXPECT_THROW(solve_k_cycle(pts, 5, SolverPolicy::automatic, {}, 18), InfeasibleError);
}

TEST(EstimateCDelta, ExactSmallCurve) {
  EstimateOptions o;
  o.replicates = 8;
  o.solver = SolverPolicy::exact;
  const auto c = estimate_c_delta(2, 10, {0.3, 0.6, 1.0}, o);
  ASSERT_EQ(c.records.size(), 3u);
  for (const auto& r : c.records) {
    EXPECT_EQ(r.solver, SolverTag::exact);
    EXPECT_EQ(r.values.size(), 8u);
  }
  EXPECT_EQ(*c.records[0].m, 3.0);
  // replicate 0 agrees with a direct exact solve on the same stream
  const auto pts = sample_uniform(10, Region::cube(2, std::sqrt(10.0)), o.seed, 0);
  EXPECT_EQ(c.records[2].values[0], exact_k_cycle(pts, 10).length / 10.0);
  EXPECT_TRUE(lower_bound_violations(c.records).empty());
}

TEST(EstimateCDelta, ExactPolicyOverCapThrows) {
  EstimateOptions o;
  o.solver = SolverPolicy::exact;
  EXPECT_THROW(estimate_c_delta(2, 30, {1.0}, o), CapacityError);
}

TEST(EstimateCDelta, WorkerCountDoesNotChangeResults) {
  EstimateOptions o;
  o.replicates = 6;
  o.solver = SolverPolicy::heuristic;
  const auto a = estimate_c_delta(2, 60, {0.5, 1.0}, o);
  o.workers = 3;
  const auto b = estimate_c_delta(2, 60, {0.5, 1.0}, o);
  EXPECT_EQ(estimates_to_csv(a.records), estimates_to_csv(b.records));
}

TEST(EstimateCDelta, RejectsBadGrid) {
  EstimateOptions o;
  EXPECT_THROW(estimate_c_delta(2, 10, {0.5, 0.5}, o), InvalidArgument);
  EXPECT_THROW(estimate_c_delta(2, 10, {1.5}, o), InvalidArgument);
}

TEST(EstimateW, ExactSmallS) {
  EstimateOptions o;
  o.replicates = 10;
  const auto recs = estimate_w(2, {2.0, 3.0}, std::nullopt, o);
  ASSERT_EQ(recs.size(), 2u);
  const auto pts = sample_poisson(Region::cube(2, 2.0), 1.0, o.seed, 0);
  EXPECT_EQ(recs[0].values[0], exact_diagonal_ratio(pts, Region::cube(2, 2.0)).ratio);
  EXPECT_TRUE(lower_bound_violations(recs).empty());
}

TEST(EstimateW, EtaCapIsNeverBetter) {
  EstimateOptions o;
  o.replicates = 10;
  const auto free = estimate_w(2, {3.0}, std::nullopt, o);
  const auto capped = estimate_w(2, {3.0}, 0.5, o);
  for (std::size_t r = 0; r < 10; ++r) EXPECT_GE(capped[0].values[r], free[0].values[r]);
  EXPECT_EQ(capped[0].functional, Functional::Ws_eta);
}

TEST(EstimateT, SmallWindowWarns) {
  EstimateOptions o;
  o.replicates = 20;
  const auto recs = estimate_t(2, {3}, o, WindowOptions{0.5, 1.0});
  EXPECT_FALSE(recs[0].warnings.empty());
}

TEST(EstimateT, MeanGrowsSublinearly) {
  EstimateOptions o;
  o.replicates = 200;
  const auto recs = estimate_t(2, {1, 4}, o);
  EXPECT_NEAR(recs[0].mean, 0.5, 4 * recs[0].stderr_mean);
  EXPECT_GT(recs[1].mean, brw_lower_bound(2).value);
  EXPECT_GT(recs[1].raw_variance, 0.0);
}

TEST(EstimateLnm, RuleParsing) {
  EXPECT_EQ(MRule::parse("sqrt")(100), 10u);
  EXPECT_EQ(MRule::parse("linear")(17), 17u);
  EXPECT_EQ(MRule::parse("pow:0.5")(49), 7u);
  EXPECT_EQ(MRule::parse("log2")(100), static_cast<std::size_t>(std::ceil(std::log(100.0) * std::log(100.0))));
  EXPECT_THROW(MRule::parse("cube"), InvalidArgument);
  EstimateOptions o;
  o.replicates = 3;
  const auto recs = estimate_lnm(2, {16, 64}, MRule::parse("sqrt"), o);
  EXPECT_EQ(*recs[1].m, 8.0);
  EXPECT_THROW(estimate_lnm(2, {4}, MRule::parse("sqrt"), o), InvalidArgument);
}

TEST(Shape, ConvexAndMonotoneSyntheticCurve) {
  CurveEstimate c;
  for (double d : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    EstimateRecord r;
    r.delta = d;
    r.mean = 0.5 + 0.2 * d;
    r.stderr_mean = 0.001;
    c.records.push_back(r);
  }
  EXPECT_TRUE(monotonicity_check(c).ok());
  EXPECT_TRUE(convexity_check(c).ok());
  c.records[2].mean = 0.2;
  EXPECT_FALSE(monotonicity_check(c).ok());
  c.records[2].mean = 1.0;
  EXPECT_FALSE(convexity_check(c).ok());
}

TEST(Fit, RecoversPlantedExponent) {
  CurveEstimate c;
  for (double d : {0.1, 0.2, 0.4, 0.8}) {
    EstimateRecord r;
    r.delta = d;
    r.mean = 0.3 + 2.0 * std::pow(d, 1.0 / 3.0);
    c.records.push_back(r);
  }
  const auto fit = fit_scaling_exponent(c, 0.3);
  EXPECT_NEAR(fit.alpha, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(std::exp(fit.log_prefactor), 2.0, 1e-12);
  EXPECT_NEAR(fit.residual_norm, 0.0, 1e-12);
  EXPECT_THROW(fit_scaling_exponent(c, 2.0), InvalidArgument);
}

TEST(EstimatesCsv, RoundTrip) {
  EstimateOptions o;
  o.replicates = 4;
  const auto recs = estimate_w(2, {2.5}, 0.4, o);
  const auto text = estimates_to_csv(recs);
  const auto back = estimates_from_csv(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(estimates_to_csv(back), text);
}

TEST(Oriented, EstimateIsAboveUnorientedOptimum) {
  EstimateOptions o;
  o.replicates = 10;
  const auto oriented = estimate_oriented({3.0}, o);
  const auto free = estimate_w(2, {3.0}, std::nullopt, o);
  for (std::size_t r = 0; r < 10; ++r) EXPECT_GE(oriented[0].values[r], free[0].values[r] - 1e-12);
}

TEST(EstimateT, SmallWindowsMatchBruteForce) {
  EstimateOptions o;
  o.replicates = 60;
  for (std::size_t m : {1ul, 2ul, 3ul, 4ul}) {
    // about six points per window on average
    const WindowOptions window{1.4 / static_cast<double>(m), 1.0};
    const auto rec = estimate_t(2, {m}, o, window).front();
    std::size_t checked = 0, k = 0;
    for (std::uint64_t r = 0; r < o.replicates; ++r) {
      const auto pts = sample_poisson_ball(2, window.multiplier * m, o.seed, r);
      if (pts.size() < m) continue;
      const double value = rec.values[k++];
      if (pts.size() > 9) continue;
      EXPECT_EQ(value, oracle::origin_path(pts, m, Point({0.0, 0.0})) / static_cast<double>(m));
      ++checked;
    }
    EXPECT_EQ(k, rec.values.size());
    EXPECT_GT(checked, 10u);
  }
}

TEST(EstimateT, DoublingTheWindowDoesNotMatter) {
  EstimateOptions o;
  o.replicates = 400;
  for (std::size_t m : {2ul, 5ul}) {
    const auto a = estimate_t(2, {m}, o, WindowOptions{3.0, 1.0}).front();
    const auto b = estimate_t(2, {m}, o, WindowOptions{6.0, 1.0}).front();
    EXPECT_LT(std::fabs(a.mean - b.mean), 2 * std::hypot(a.stderr_mean, b.stderr_mean)) << "m=" << m;
  }
}
