#pragma once

// Exponential-time exact solvers: subset dynamic programming over
// (subset, last point) states, one table entry per state holding the
// minimal open-path length. Lengths are accumulated edge by edge in path
// order, so a reported optimum equals path_length() of its own order exactly.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "minratio/errors.hpp"
#include "minratio/points.hpp"

namespace minratio {

inline constexpr std::size_t kDefaultExactCap = 18;

/// Cycle through a chosen subset of points. The order starts at the smallest
/// selected index.
struct CycleSolution {
  std::vector<std::size_t> order;
  double length = 0.0;
  std::size_t m = 0;
  bool optimal = false;
};

/// Open path from an anchor point through m distinct points.
struct PathSolution {
  Point origin;
  std::vector<std::size_t> order;
  double length = 0.0;
  std::size_t m = 0;
  bool optimal = false;
};

/// Path between two endpoints through distinct interior points, scored by
/// its average edge length.
struct RatioPath {
  Point start;
  Point end;
  std::vector<std::size_t> interior;
  std::vector<Point> vertices;  // start, interior points, end
  double length = 0.0;
  std::size_t edges = 1;
  double ratio = 0.0;
  std::optional<std::size_t> max_interior;
  bool optimal = false;
};

/// Builds a RatioPath from its vertex polyline; length is accumulated in order.
inline RatioPath make_ratio_path(std::vector<Point> vertices, std::vector<std::size_t> interior,
                                 std::optional<std::size_t> max_interior = std::nullopt, bool optimal = false) {
  if (vertices.size() < 2) throw InvalidArgument("ratio path needs two endpoints");
  RatioPath path;
  path.start = vertices.front();
  path.end = vertices.back();
  for (std::size_t i = 1; i < vertices.size(); ++i) path.length += distance(vertices[i - 1], vertices[i]);
  path.edges = vertices.size() - 1;
  path.ratio = path.length / static_cast<double>(path.edges);
  path.vertices = std::move(vertices);
  path.interior = std::move(interior);
  path.max_interior = max_interior;
  path.optimal = optimal;
  return path;
}

inline RatioPath make_ratio_path(const PointSet& points, const Point& start, const Point& end,
                                 std::vector<std::size_t> interior,
                                 std::optional<std::size_t> max_interior = std::nullopt, bool optimal = false) {
  std::vector<Point> vertices;
  vertices.reserve(interior.size() + 2);
  vertices.push_back(start);
  for (auto i : interior) vertices.push_back(points.point(i));
  vertices.push_back(end);
  return make_ratio_path(std::move(vertices), std::move(interior), max_interior, optimal);
}

namespace detail {

/// Dense distance matrix over the points followed by any extra anchors.
class DistanceMatrix {
 public:
  DistanceMatrix(const PointSet& points, const std::vector<Point>& anchors)
      : size_(points.size() + anchors.size()), d_(size_ * size_) {
    std::vector<std::span<const double>> at;
    at.reserve(size_);
    for (std::size_t i = 0; i < points.size(); ++i) at.push_back(points[i]);
    for (const auto& a : anchors) at.push_back(a.span());
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t j = 0; j < size_; ++j) d_[i * size_ + j] = distance(at[i], at[j]);
    }
  }

  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * size_ + j]; }

 private:
  std::size_t size_;
  std::vector<double> d_;
};

inline void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) throw CapacityError(n, cap);
  if (cap > 26) throw InvalidArgument("exact solver cap above 26 would exhaust memory");
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::uint8_t kNoParent = 0xFF;

/// Open-path table: dp[S][j] is the minimal length of a path that leaves
/// the anchor, visits exactly the set S and ends at j.
class AnchoredPathTable {
 public:
  AnchoredPathTable(const PointSet& points, const Point& anchor, std::size_t max_size, std::size_t cap)
      : n_(points.size()), dist_(points, {anchor}) {
    check_cap(n_, cap);
    const std::size_t states = std::size_t{1} << n_;
    dp_.assign(states * n_, kInf);
    parent_.assign(states * n_, kNoParent);
    for (std::size_t j = 0; j < n_; ++j) dp_[index(std::size_t{1} << j, j)] = dist_(n_, j);
    for (std::size_t set = 1; set < states; ++set) {
      if (static_cast<std::size_t>(std::popcount(set)) >= max_size) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (!(set >> j & 1u)) continue;
        const double here = dp_[index(set, j)];
        if (here == kInf) continue;
        for (std::size_t k = 0; k < n_; ++k) {
          if (set >> k & 1u) continue;
          const std::size_t next = set | (std::size_t{1} << k);
          const double cand = here + dist_(j, k);
          double& slot = dp_[index(next, k)];
          if (cand < slot) {
            slot = cand;
            parent_[index(next, k)] = static_cast<std::uint8_t>(j);
          }
        }
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  double at(std::size_t set, std::size_t last) const noexcept { return dp_[index(set, last)]; }
  const DistanceMatrix& dist() const noexcept { return dist_; }

  std::vector<std::size_t> order(std::size_t set, std::size_t last) const {
    std::vector<std::size_t> seq;
    while (set) {
      seq.push_back(last);
      const auto p = parent_[index(set, last)];
      set &= ~(std::size_t{1} << last);
      last = p;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

 private:
  std::size_t index(std::size_t set, std::size_t last) const noexcept { return set * n_ + last; }

  std::size_t n_;
  DistanceMatrix dist_;
  std::vector<double> dp_;
  std::vector<std::uint8_t> parent_;
};

}  // namespace detail

/// Shortest cycle through exactly m of the points (a 2-cycle counts its edge
/// twice). Subsets are rooted at their smallest index.
inline CycleSolution exact_k_cycle(const PointSet& points, std::size_t m, std::size_t cap = kDefaultExactCap) {
  const std::size_t n = points.size();
  if (m < 2) throw InvalidArgument("exact_k_cycle: m must be at least 2");
  if (m > n) throw InfeasibleError("exact_k_cycle: m exceeds the number of points");
  detail::check_cap(n, cap);

  detail::DistanceMatrix dist(points, {});
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> dp(states * n, detail::kInf);
  std::vector<std::uint8_t> parent(states * n, detail::kNoParent);
  for (std::size_t i = 0; i < n; ++i) dp[(std::size_t{1} << i) * n + i] = 0.0;

  double best = detail::kInf;
  std::size_t best_set = 0;
  std::size_t best_last = 0;
  for (std::size_t set = 1; set < states; ++set) {
    const auto size = static_cast<std::size_t>(std::popcount(set));
    if (size > m) continue;
    const auto root = static_cast<std::size_t>(std::countr_zero(set));
    for (std::size_t j = root; j < n; ++j) {
      if (!(set >> j & 1u)) continue;
      const double here = dp[set * n + j];
      if (here == detail::kInf) continue;
      if (size == m) {
        const double closed = here + dist(j, root);
        if (closed < best) {
          best = closed;
          best_set = set;
          best_last = j;
        }
        continue;
      }
      for (std::size_t k = root + 1; k < n; ++k) {
        if (set >> k & 1u) continue;
        const std::size_t next = set | (std::size_t{1} << k);
        const double cand = here + dist(j, k);
        if (cand < dp[next * n + k]) {
          dp[next * n + k] = cand;
          parent[next * n + k] = static_cast<std::uint8_t>(j);
        }
      }
    }
  }

  CycleSolution sol;
  std::size_t set = best_set;
  std::size_t last = best_last;
  while (set) {
    sol.order.push_back(last);
    const auto p = parent[set * n + last];
    set &= ~(std::size_t{1} << last);
    last = p;
  }
  std::reverse(sol.order.begin(), sol.order.end());
  sol.length = best;
  sol.m = m;
  sol.optimal = true;
  return sol;
}

/// Shortest open path from `origin` through exactly m distinct points.
inline PathSolution exact_origin_path(const PointSet& points, std::size_t m, const Point& origin,
                                      std::size_t cap = kDefaultExactCap) {
  const std::size_t n = points.size();
  if (m < 1) throw InvalidArgument("exact_origin_path: m must be at least 1");
  if (m > n) throw InfeasibleError("exact_origin_path: m exceeds the number of points");
  if (origin.dim() != points.dim()) throw InvalidArgument("exact_origin_path: origin dimension mismatch");
  detail::AnchoredPathTable table(points, origin, m, cap);

  double best = detail::kInf;
  std::size_t best_set = 0;
  std::size_t best_last = 0;
  for (std::size_t set = 1; set < (std::size_t{1} << n); ++set) {
    if (static_cast<std::size_t>(std::popcount(set)) != m) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(set >> j & 1u)) continue;
      if (table.at(set, j) < best) {
        best = table.at(set, j);
        best_set = set;
        best_last = j;
      }
    }
  }
  return {origin, table.order(best_set, best_last), best, m, true};
}

/// Minimal corner-to-corner path length for every interior-point count,
/// kept alive so parametric solvers can query it repeatedly.
class DiagonalPathTable {
 public:
  DiagonalPathTable(const PointSet& points, const Region& region, std::optional<std::size_t> max_interior,
                    std::size_t cap = kDefaultExactCap)
      : points_(&points),
        start_(region.lower()),
        end_(region.upper()),
        max_interior_(max_interior),
        table_(points, start_, std::min(points.size(), max_interior.value_or(points.size())), cap) {
    const std::size_t n = points.size();
    const std::size_t limit = std::min(n, max_interior.value_or(n));
    best_.assign(limit + 1, detail::kInf);
    state_.assign(limit + 1, {0, 0});
    best_[0] = distance(start_, end_);
    for (std::size_t set = 1; set < (std::size_t{1} << n); ++set) {
      const auto k = static_cast<std::size_t>(std::popcount(set));
      if (k > limit) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!(set >> j & 1u)) continue;
        const double closed = table_.at(set, j) + distance((*points_)[j], end_.span());
        if (closed < best_[k]) {
          best_[k] = closed;
          state_[k] = {set, j};
        }
      }
    }
  }

  /// Largest admissible interior-point count.
  std::size_t max_k() const noexcept { return best_.size() - 1; }
  /// Minimal length with exactly k interior points (k + 1 edges).
  double length(std::size_t k) const { return best_.at(k); }

  RatioPath path(std::size_t k, bool optimal) const {
    std::vector<std::size_t> interior;
    if (k > 0) interior = table_.order(state_[k].first, state_[k].second);
    return make_ratio_path(*points_, start_, end_, std::move(interior), max_interior_, optimal);
  }

  /// Interior count minimising length(k) - c * (k + 1); first minimum wins.
  std::size_t argmin_parametric(double c) const {
    std::size_t arg = 0;
    double best = detail::kInf;
    for (std::size_t k = 0; k <= max_k(); ++k) {
      const double v = best_[k] - c * static_cast<double>(k + 1);
      if (v < best) {
        best = v;
        arg = k;
      }
    }
    return arg;
  }

  /// Interior count minimising length(k) / (k + 1); first minimum wins.
  std::size_t argmin_ratio() const {
    std::size_t arg = 0;
    double best = detail::kInf;
    for (std::size_t k = 0; k <= max_k(); ++k) {
      const double w = best_[k] / static_cast<double>(k + 1);
      if (w < best) {
        best = w;
        arg = k;
      }
    }
    return arg;
  }

 private:
  const PointSet* points_;
  Point start_;
  Point end_;
  std::optional<std::size_t> max_interior_;
  detail::AnchoredPathTable table_;
  std::vector<double> best_;
  std::vector<std::pair<std::size_t, std::size_t>> state_;
};

/// Minimum average edge length over paths from the region's lower corner to
/// its upper corner through at most `max_interior` distinct points.
inline RatioPath exact_diagonal_ratio(const PointSet& points, const Region& region,
                                      std::optional<std::size_t> max_interior = std::nullopt,
                                      std::size_t cap = kDefaultExactCap) {
  if (region.dim() != points.dim()) throw InvalidArgument("exact_diagonal_ratio: region dimension mismatch");
  DiagonalPathTable table(points, region, max_interior, cap);
  return table.path(table.argmin_ratio(), true);
}

}  // namespace minratio
