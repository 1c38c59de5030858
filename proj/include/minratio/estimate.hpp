#pragma once

// Monte Carlo drivers. Every replicate r draws its points from the stream
// (seed, r), and the same replicate is reused across a parameter grid
// (common random numbers). Replicates run in parallel; results are reduced in
// replicate order, so output is bit-identical for any worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "minratio/bounds.hpp"
#include "minratio/errors.hpp"
#include "minratio/exact.hpp"
#include "minratio/io.hpp"
#include "minratio/parallel.hpp"
#include "minratio/points.hpp"
#include "minratio/search.hpp"
#include "minratio/stats.hpp"

namespace minratio {

enum class Functional { Ln_delta, Ls_delta, Ws, Ws_eta, Tm, Lnm, oriented };
enum class SolverTag { exact, heuristic };
enum class SolverPolicy { exact, heuristic, automatic };

inline std::string to_string(Functional f) {
  switch (f) {
    case Functional::Ln_delta: return "Ln_delta";
    case Functional::Ls_delta: return "Ls_delta";
    case Functional::Ws: return "Ws";
    case Functional::Ws_eta: return "Ws_eta";
    case Functional::Tm: return "Tm";
    case Functional::Lnm: return "Lnm";
    case Functional::oriented: return "oriented";
  }
  return "?";
}

inline std::string to_string(SolverTag t) { return t == SolverTag::exact ? "exact" : "heuristic"; }

struct EstimateRecord {
  Functional functional = Functional::Ln_delta;
  int d = 2;
  std::optional<double> n;
  std::optional<double> s;
  std::optional<double> delta;
  std::optional<double> m;
  std::optional<double> eta;
  std::size_t replicates = 0;
  double mean = 0.0;  // of the normalised per-replicate values
  double variance = 0.0;
  double stderr_mean = 0.0;
  SolverTag solver = SolverTag::exact;
  std::uint64_t seed = 0;
  /// Normalised value per replicate, in replicate order.
  std::vector<double> values;
  /// Variance of the unnormalised functional (used for var T_m tables).
  double raw_variance = 0.0;
  std::vector<std::string> warnings;
};

struct CurveEstimate {
  int d = 2;
  double n = 0.0;
  std::vector<EstimateRecord> records;

  void validate() const {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const double delta = records[i].delta.value_or(-1.0);
      if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("curve: delta values must lie in (0, 1]");
      if (i > 0 && !(records[i - 1].delta.value() < delta)) {
        throw InvalidArgument("curve: delta grid must be strictly increasing");
      }
    }
  }
};

struct EstimateOptions {
  std::size_t replicates = 20;
  std::uint64_t seed = 1;
  SolverPolicy solver = SolverPolicy::automatic;
  std::size_t workers = 1;
  SearchOptions search{};
  std::size_t exact_cap = kDefaultExactCap;
};

/// ceil(fraction * count), treating products within 1e-9 of an integer as that integer.
inline std::size_t ceil_fraction(double fraction, double count) {
  const double x = fraction * count;
  const double r = std::round(x);
  if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

inline std::size_t floor_fraction(double fraction, double count) {
  const double x = fraction * count;
  const double r = std::round(x);
  if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::floor(x));
}

struct SolvedLength {
  double length = 0.0;
  SolverTag tag = SolverTag::exact;
};

inline SearchOptions replicate_search(const SearchOptions& base, std::uint64_t seed, std::uint64_t replicate) {
  SearchOptions s = base;
  s.stream = {seed, replicate, substream::kSearch};
  return s;
}

/// Shortest cycle through m of the points under a solver policy. m <= 1
/// gives 0 and m = 2 the doubled closest-pair distance.
inline SolvedLength solve_k_cycle(const PointSet& points, std::size_t m, SolverPolicy policy,
                                  const SearchOptions& search, std::size_t cap) {
  if (m > points.size()) throw InfeasibleError("solve_k_cycle: m exceeds the number of points");
  if (m <= 1) return {0.0, SolverTag::exact};
  if (m == 2) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = i + 1; j < points.size(); ++j) {
        const double dij = distance(points[i], points[j]);
        best = std::min(best, dij + dij);
      }
    }
    return {best, SolverTag::exact};
  }
  const bool exact = policy == SolverPolicy::exact || (policy == SolverPolicy::automatic && points.size() <= cap);
  if (exact) return {exact_k_cycle(points, m, cap).length, SolverTag::exact};
  return {local_search_k_cycle(points, m, search).length, SolverTag::heuristic};
}

namespace detail {

inline EstimateRecord summarize(Functional f, int d, const EstimateOptions& opts, std::vector<double> values,
                                bool any_heuristic) {
  EstimateRecord rec;
  rec.functional = f;
  rec.d = d;
  const auto mom = moments_of(values);
  rec.replicates = mom.count();
  rec.mean = mom.mean();
  rec.variance = mom.variance();
  rec.stderr_mean = mom.stderr_of_mean();
  rec.solver = any_heuristic ? SolverTag::heuristic : SolverTag::exact;
  rec.seed = opts.seed;
  rec.values = std::move(values);
  return rec;
}

inline void check_policy_size(SolverPolicy policy, std::size_t n, std::size_t cap) {
  if (policy == SolverPolicy::exact && n > cap) throw CapacityError(n, cap);
}

}  // namespace detail

/// L_n(delta) / (delta n) for n uniform points in the volume-n cube, over a delta grid.
inline CurveEstimate estimate_c_delta(int d, std::size_t n, const std::vector<double>& deltas,
                                      const EstimateOptions& opts) {
  if (d < 2) throw InvalidArgument("estimate_c_delta: d must be at least 2");
  if (opts.replicates < 1) throw InvalidArgument("estimate_c_delta: replicates must be positive");
  detail::check_policy_size(opts.solver, n, opts.exact_cap);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] <= 1.0)) throw InvalidArgument("estimate_c_delta: delta must lie in (0, 1]");
    if (i && !(deltas[i - 1] < deltas[i])) throw InvalidArgument("estimate_c_delta: delta grid must increase");
  }
  const double side = std::pow(static_cast<double>(n), 1.0 / d);
  const auto cube = Region::cube(static_cast<std::size_t>(d), side);

  auto per_replicate = parallel_map(opts.replicates, opts.workers, [&](std::size_t r) {
    const auto pts = sample_uniform(static_cast<long long>(n), cube, opts.seed, r);
    const auto search = replicate_search(opts.search, opts.seed, r);
    std::vector<SolvedLength> row;
    for (double delta : deltas) {
      const std::size_t m = ceil_fraction(delta, static_cast<double>(n));
      row.push_back(solve_k_cycle(pts, m, opts.solver, search, opts.exact_cap));
    }
    return row;
  });

  CurveEstimate curve;
  curve.d = d;
  curve.n = static_cast<double>(n);
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    std::vector<double> values;
    bool heuristic = false;
    for (const auto& row : per_replicate) {
      values.push_back(row[k].length / (deltas[k] * static_cast<double>(n)));
      heuristic |= row[k].tag == SolverTag::heuristic;
    }
    auto rec = detail::summarize(Functional::Ln_delta, d, opts, std::move(values), heuristic);
    rec.n = static_cast<double>(n);
    rec.delta = deltas[k];
    rec.m = static_cast<double>(ceil_fraction(deltas[k], static_cast<double>(n)));
    curve.records.push_back(std::move(rec));
  }
  return curve;
}

/// L(s, delta) replicates on rate-1 Poisson points in [0, s]^d, with
/// m = ceil(delta N(s)). Used for the finite-size upper bound.
inline FiniteSizeSample sample_finite_s(int d, double s, double delta, const EstimateOptions& opts) {
  const auto cube = Region::cube(static_cast<std::size_t>(d), s);
  auto solved = parallel_map(opts.replicates, opts.workers, [&](std::size_t r) {
    const auto pts = sample_poisson(cube, 1.0, opts.seed, r);
    const std::size_t m = ceil_fraction(delta, static_cast<double>(pts.size()));
    SolverPolicy policy = opts.solver;
    if (policy == SolverPolicy::exact && pts.size() > opts.exact_cap) policy = SolverPolicy::heuristic;
    return solve_k_cycle(pts, m, policy, replicate_search(opts.search, opts.seed, r), opts.exact_cap);
  });
  FiniteSizeSample sample;
  sample.s = s;
  sample.delta = delta;
  for (const auto& x : solved) {
    sample.lengths.push_back(x.length);
    sample.heuristic |= x.tag == SolverTag::heuristic;
  }
  return sample;
}

/// W_s (or W_s^(eta) with at most floor(eta s) interior points) over an s grid.
inline std::vector<EstimateRecord> estimate_w(int d, const std::vector<double>& s_grid, std::optional<double> eta,
                                              const EstimateOptions& opts) {
  if (d < 2) throw InvalidArgument("estimate_w: d must be at least 2");
  if (opts.replicates < 1) throw InvalidArgument("estimate_w: replicates must be positive");
  if (eta && !(*eta >= 0.0)) throw InvalidArgument("estimate_w: eta must be non-negative");
  std::vector<EstimateRecord> out;
  for (double s : s_grid) {
    if (!(s > 0.0)) throw InvalidArgument("estimate_w: s must be positive");
    const auto cube = Region::cube(static_cast<std::size_t>(d), s);
    std::optional<std::size_t> limit;
    if (eta) limit = floor_fraction(*eta, s);
    auto solved = parallel_map(opts.replicates, opts.workers, [&](std::size_t r) {
      const auto pts = sample_poisson(cube, 1.0, opts.seed, r);
      detail::check_policy_size(opts.solver, pts.size(), opts.exact_cap);
      const bool exact = opts.solver != SolverPolicy::heuristic && pts.size() <= opts.exact_cap;
      if (exact) return SolvedLength{exact_diagonal_ratio(pts, cube, limit, opts.exact_cap).ratio, SolverTag::exact};
      auto search = replicate_search(opts.search, opts.seed, r);
      search.allow_exact_inner = false;
      return SolvedLength{dinkelbach_ratio_path(pts, cube, limit, search).ratio, SolverTag::heuristic};
    });
    std::vector<double> values;
    bool heuristic = false;
    for (const auto& x : solved) {
      values.push_back(x.length);
      heuristic |= x.tag == SolverTag::heuristic;
    }
    auto rec = detail::summarize(eta ? Functional::Ws_eta : Functional::Ws, d, opts, std::move(values), heuristic);
    rec.s = s;
    rec.eta = eta;
    if (heuristic) rec.warnings.push_back("heuristic solves: mean is an upper estimate of E W_s");
    out.push_back(std::move(rec));
  }
  return out;
}

struct WindowOptions {
  double multiplier = 3.0;
  /// Path-length scale per point; the window radius is multiplier * m * scale.
  double scale = 1.0;
  std::size_t node_budget = 2'000'000;
};

/// Rate-1 Poisson points in the ball of the given radius around the origin
/// (drawn in the bounding cube and thinned).
inline PointSet sample_poisson_ball(int d, double radius, std::uint64_t seed, std::uint64_t replicate) {
  const auto box = Region(Point(std::vector<double>(static_cast<std::size_t>(d), -radius)),
                          std::vector<double>(static_cast<std::size_t>(d), 2.0 * radius));
  const auto raw = sample_poisson(box, 1.0, seed, replicate);
  const Point origin(std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<double> kept;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (distance(origin.span(), raw[i]) <= radius) kept.insert(kept.end(), raw[i].begin(), raw[i].end());
  }
  return PointSet(box, std::move(kept), raw.provenance());
}

/// T_m / m from the origin over an m grid, with the raw variance of T_m.
inline std::vector<EstimateRecord> estimate_t(int d, const std::vector<std::size_t>& m_grid,
                                              const EstimateOptions& opts, const WindowOptions& window = {}) {
  if (d < 2) throw InvalidArgument("estimate_t: d must be at least 2");
  if (!(window.multiplier > 0.0) || !(window.scale > 0.0)) throw InvalidArgument("estimate_t: window must be positive");
  if (opts.replicates < 1) throw InvalidArgument("estimate_t: replicates must be positive");
  std::vector<EstimateRecord> out;
  const Point origin(std::vector<double>(static_cast<std::size_t>(d), 0.0));
  for (std::size_t m : m_grid) {
    if (m < 1) throw InvalidArgument("estimate_t: m must be at least 1");
    const double radius = window.multiplier * static_cast<double>(m) * window.scale;
    struct Outcome {
      std::optional<double> length;
      SolverTag tag = SolverTag::exact;
    };
    auto solved = parallel_map(opts.replicates, opts.workers, [&](std::size_t r) -> Outcome {
      const auto pts = sample_poisson_ball(d, radius, opts.seed, r);
      if (pts.size() < m) return {};
      const auto search = replicate_search(opts.search, opts.seed, r);
      if (opts.solver == SolverPolicy::heuristic) {
        return {heuristic_origin_path(pts, m, origin, search).length, SolverTag::heuristic};
      }
      if (auto sol = branch_and_bound_origin_path(pts, m, origin, window.node_budget, search)) {
        return {sol->length, SolverTag::exact};
      }
      if (opts.solver == SolverPolicy::exact) {
        throw CapacityError(window.node_budget, window.node_budget);
      }
      return {heuristic_origin_path(pts, m, origin, search).length, SolverTag::heuristic};
    });
    std::vector<double> values;
    std::vector<double> raw;
    bool heuristic = false;
    std::size_t short_windows = 0;
    for (const auto& o : solved) {
      if (!o.length) {
        ++short_windows;
        continue;
      }
      raw.push_back(*o.length);
      values.push_back(*o.length / static_cast<double>(m));
      heuristic |= o.tag == SolverTag::heuristic;
    }
    if (values.empty()) throw InfeasibleError("estimate_t: no replicate had m points in the window");
    auto rec = detail::summarize(Functional::Tm, d, opts, std::move(values), heuristic);
    rec.m = static_cast<double>(m);
    rec.raw_variance = moments_of(raw).variance();
    const double expected = unit_ball_volume(d) * std::pow(radius, d);
    if (expected < 4.0 * static_cast<double>(m)) {
      rec.warnings.push_back("window holds " + format_double(expected) + " points on average, fewer than 4m");
    }
    if (short_windows) {
      rec.warnings.push_back(std::to_string(short_windows) + " replicates had fewer than m points and were skipped");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

/// Rule m_n for L(n, m_n).
struct MRule {
  enum class Kind { linear, sqrt, log_squared, power } kind = Kind::sqrt;
  double gamma = 0.5;

  std::size_t operator()(std::size_t n) const {
    const double x = static_cast<double>(n);
    switch (kind) {
      case Kind::linear: return n;
      case Kind::sqrt: return ceil_fraction(1.0, std::sqrt(x));
      case Kind::log_squared: return ceil_fraction(1.0, std::log(x) * std::log(x));
      case Kind::power: return ceil_fraction(1.0, std::pow(x, gamma));
    }
    return n;
  }

  static MRule parse(const std::string& text) {
    if (text == "linear") return {Kind::linear, 1.0};
    if (text == "sqrt") return {Kind::sqrt, 0.5};
    if (text == "log2") return {Kind::log_squared, 0.0};
    if (text.rfind("pow:", 0) == 0) return {Kind::power, parse_double(text.substr(4))};
    throw InvalidArgument("unknown m_n rule '" + text + "' (linear, sqrt, log2, pow:GAMMA)");
  }
};

/// L(n, m_n) / m_n for n uniform points in the volume-n cube.
inline std::vector<EstimateRecord> estimate_lnm(int d, const std::vector<std::size_t>& n_grid, const MRule& rule,
                                                const EstimateOptions& opts) {
  if (d < 2) throw InvalidArgument("estimate_lnm: d must be at least 2");
  std::vector<EstimateRecord> out;
  for (std::size_t n : n_grid) {
    const std::size_t m = rule(n);
    if (m < 3 || m > n) throw InvalidArgument("estimate_lnm: rule gives m = " + std::to_string(m) + " for n = " +
                                              std::to_string(n) + ", need 3 <= m <= n");
    detail::check_policy_size(opts.solver, n, opts.exact_cap);
    const auto cube = Region::cube(static_cast<std::size_t>(d), std::pow(static_cast<double>(n), 1.0 / d));
    auto solved = parallel_map(opts.replicates, opts.workers, [&](std::size_t r) {
      const auto pts = sample_uniform(static_cast<long long>(n), cube, opts.seed, r);
      return solve_k_cycle(pts, m, opts.solver, replicate_search(opts.search, opts.seed, r), opts.exact_cap);
    });
    std::vector<double> values;
    bool heuristic = false;
    for (const auto& x : solved) {
      values.push_back(x.length / static_cast<double>(m));
      heuristic |= x.tag == SolverTag::heuristic;
    }
    auto rec = detail::summarize(Functional::Lnm, d, opts, std::move(values), heuristic);
    rec.n = static_cast<double>(n);
    rec.m = static_cast<double>(m);
    out.push_back(std::move(rec));
  }
  return out;
}

/// Minimum average edge length of y-increasing diagonal paths, d = 2.
inline std::vector<EstimateRecord> estimate_oriented(const std::vector<double>& s_grid, const EstimateOptions& opts) {
  std::vector<EstimateRecord> out;
  for (double s : s_grid) {
    if (!(s > 0.0)) throw InvalidArgument("estimate_oriented: s must be positive");
    const auto cube = Region::cube(2, s);
    auto values = parallel_map(opts.replicates, opts.workers, [&](std::size_t r) {
      const auto pts = sample_poisson(cube, 1.0, opts.seed, r);
      return oriented_path_search(pts, cube, replicate_search(opts.search, opts.seed, r)).path.ratio;
    });
    auto rec = detail::summarize(Functional::oriented, 2, opts, std::move(values), false);
    rec.s = s;
    out.push_back(std::move(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curve analyses.

struct FitResult {
  double alpha = 0.0;
  double c0 = 0.0;
  /// log of the prefactor A in mean - c0 ~ A delta^alpha.
  double log_prefactor = 0.0;
  double residual_norm = 0.0;
  std::vector<double> grid;
};

/// Least-squares slope of log(mean - c0) against log(delta).
inline FitResult fit_scaling_exponent(const CurveEstimate& curve, double c0) {
  curve.validate();
  if (curve.records.size() < 3) throw InvalidArgument("fit_scaling_exponent: need at least 3 grid points");
  std::vector<double> offending;
  for (const auto& r : curve.records) {
    if (!(r.mean - c0 > 0.0)) offending.push_back(*r.delta);
  }
  if (!offending.empty()) {
    std::string list;
    for (double x : offending) list += (list.empty() ? "" : ", ") + format_double(x);
    throw InvalidArgument("fit_scaling_exponent: mean - c0 is not positive at delta = " + list);
  }
  const auto k = static_cast<double>(curve.records.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  FitResult fit;
  fit.c0 = c0;
  for (const auto& r : curve.records) {
    const double x = std::log(*r.delta);
    const double y = std::log(r.mean - c0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    fit.grid.push_back(*r.delta);
  }
  const double denom = k * sxx - sx * sx;
  fit.alpha = (k * sxy - sx * sy) / denom;
  fit.log_prefactor = (sy - fit.alpha * sx) / k;
  double rss = 0.0;
  for (const auto& r : curve.records) {
    const double resid = std::log(r.mean - c0) - (fit.log_prefactor + fit.alpha * std::log(*r.delta));
    rss += resid * resid;
  }
  fit.residual_norm = std::sqrt(rss);
  return fit;
}

struct ShapeViolation {
  double delta = 0.0;
  double other_delta = 0.0;
  double excess = 0.0;     // amount by which the inequality fails
  double threshold = 0.0;  // allowed slack (3 pooled SE)
};

struct ShapeReport {
  std::vector<ShapeViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// delta * c(delta) must not exceed the chord of its neighbours by more than
/// 3 pooled standard errors at any interior grid point.
inline ShapeReport convexity_check(const CurveEstimate& curve, double sigmas = 3.0) {
  curve.validate();
  if (curve.records.size() < 3) throw InvalidArgument("convexity_check: need at least 3 grid points");
  ShapeReport report;
  const auto& rs = curve.records;
  for (std::size_t i = 1; i + 1 < rs.size(); ++i) {
    const double x0 = *rs[i - 1].delta, x1 = *rs[i].delta, x2 = *rs[i + 1].delta;
    const double lam = (x2 - x1) / (x2 - x0);
    const double diff = x1 * rs[i].mean - lam * x0 * rs[i - 1].mean - (1.0 - lam) * x2 * rs[i + 1].mean;
    const double se = std::sqrt(x1 * x1 * rs[i].stderr_mean * rs[i].stderr_mean +
                                lam * lam * x0 * x0 * rs[i - 1].stderr_mean * rs[i - 1].stderr_mean +
                                (1.0 - lam) * (1.0 - lam) * x2 * x2 * rs[i + 1].stderr_mean * rs[i + 1].stderr_mean);
    if (diff > sigmas * se) report.violations.push_back({x1, x1, diff, sigmas * se});
  }
  return report;
}

/// mean(delta1) <= mean(delta2) + 3 pooled SE for every delta1 < delta2.
inline ShapeReport monotonicity_check(const CurveEstimate& curve, double sigmas = 3.0) {
  curve.validate();
  ShapeReport report;
  const auto& rs = curve.records;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    for (std::size_t j = i + 1; j < rs.size(); ++j) {
      const double diff = rs[i].mean - rs[j].mean;
      const double se = std::hypot(rs[i].stderr_mean, rs[j].stderr_mean);
      if (diff > sigmas * se) report.violations.push_back({*rs[i].delta, *rs[j].delta, diff, sigmas * se});
    }
  }
  return report;
}

/// Records whose mean falls below the analytic lower bound by more than 3 SE.
inline std::vector<const EstimateRecord*> lower_bound_violations(const std::vector<EstimateRecord>& records,
                                                                 double sigmas = 3.0) {
  std::vector<const EstimateRecord*> bad;
  for (const auto& r : records) {
    const double lb = brw_lower_bound(r.d).value;
    if (r.mean < lb - sigmas * r.stderr_mean) bad.push_back(&r);
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Output.

inline std::string estimates_csv_header() {
  return "functional,d,n,s,delta,m,eta,replicates,mean,variance,stderr,solver,seed";
}

inline std::string to_csv_row(const EstimateRecord& r) {
  auto opt = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
  return join({to_string(r.functional), std::to_string(r.d), opt(r.n), opt(r.s), opt(r.delta), opt(r.m), opt(r.eta),
               std::to_string(r.replicates), format_double(r.mean), format_double(r.variance),
               format_double(r.stderr_mean), to_string(r.solver), std::to_string(r.seed)});
}

inline std::string estimates_to_csv(const std::vector<EstimateRecord>& records) {
  std::string out = estimates_csv_header() + "\n";
  for (const auto& r : records) out += to_csv_row(r) + "\n";
  return out;
}

/// Parses rows written by estimates_to_csv (per-replicate values are not stored).
inline std::vector<EstimateRecord> estimates_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != estimates_csv_header()) {
    throw InvalidArgument("estimates csv: unexpected header");
  }
  std::vector<EstimateRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 13) throw InvalidArgument("estimates csv line " + std::to_string(lineno) + ": expected 13 fields");
    EstimateRecord r;
    const std::vector<std::pair<Functional, std::string>> names = {
        {Functional::Ln_delta, "Ln_delta"}, {Functional::Ls_delta, "Ls_delta"}, {Functional::Ws, "Ws"},
        {Functional::Ws_eta, "Ws_eta"},     {Functional::Tm, "Tm"},             {Functional::Lnm, "Lnm"},
        {Functional::oriented, "oriented"}};
    bool known = false;
    for (const auto& [fn, name] : names) {
      if (name == f[0]) {
        r.functional = fn;
        known = true;
      }
    }
    if (!known) throw InvalidArgument("estimates csv line " + std::to_string(lineno) + ": unknown functional");
    auto opt = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return parse_double(s);
    };
    r.d = static_cast<int>(parse_double(f[1]));
    r.n = opt(f[2]);
    r.s = opt(f[3]);
    r.delta = opt(f[4]);
    r.m = opt(f[5]);
    r.eta = opt(f[6]);
    r.replicates = static_cast<std::size_t>(parse_double(f[7]));
    r.mean = parse_double(f[8]);
    r.variance = parse_double(f[9]);
    r.stderr_mean = parse_double(f[10]);
    r.solver = f[11] == "exact" ? SolverTag::exact : SolverTag::heuristic;
    r.seed = std::stoull(f[12]);
    out.push_back(std::move(r));
  }
  return out;
}

/// gnuplot script plotting mean +- stderr from an estimates CSV.
inline std::string gnuplot_script(const std::string& csv_name, const std::string& x_column, const std::string& title) {
  const std::vector<std::string> cols = {"functional", "d", "n", "s", "delta", "m", "eta", "replicates",
                                         "mean", "variance", "stderr", "solver", "seed"};
  std::size_t x = 0;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] == x_column) x = i + 1;
  }
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set title '" << title << "'\n"
     << "set xlabel '" << x_column << "'\n"
     << "set ylabel 'mean'\n"
     << "plot '" << csv_name << "' using " << x << ":9:11 with yerrorlines title '" << title << "'\n";
  return gp.str();
}

}  // namespace minratio
