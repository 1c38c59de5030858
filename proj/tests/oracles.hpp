#pragma once

// Factorial brute-force references. Lengths are accumulated edge by edge in
// path order, the same way the solvers accumulate them.

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "minratio/points.hpp"
#include "minratio/rng.hpp"

namespace oracle {

using minratio::Point;
using minratio::PointSet;

template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> pick(k);
  auto rec = [&](auto&& self, std::size_t from, std::size_t depth) -> void {
    if (depth == k) {
      fn(pick);
      return;
    }
    for (std::size_t i = from; i < n; ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
}

inline double chain(const std::vector<Point>& v) {
  double l = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) l += minratio::distance(v[i - 1], v[i]);
  return l;
}

inline double k_cycle(const PointSet& pts, std::size_t m) {
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(pts.size(), m, [&](std::vector<std::size_t> s) {
    do {
      std::vector<Point> v;
      for (auto i : s) v.push_back(pts.point(i));
      v.push_back(pts.point(s.front()));
      best = std::min(best, chain(v));
    } while (std::next_permutation(s.begin() + 1, s.end()));
  });
  return best;
}

inline double origin_path(const PointSet& pts, std::size_t m, const Point& origin) {
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(pts.size(), m, [&](std::vector<std::size_t> s) {
    do {
      std::vector<Point> v{origin};
      for (auto i : s) v.push_back(pts.point(i));
      best = std::min(best, chain(v));
    } while (std::next_permutation(s.begin(), s.end()));
  });
  return best;
}

/// Minimum ratio over every corner-to-corner path; optionally only paths
/// whose second coordinate strictly increases.
inline double diagonal_ratio(const PointSet& pts, const minratio::Region& region,
                             std::optional<std::size_t> max_interior = std::nullopt, bool oriented = false) {
  const std::size_t limit = std::min(pts.size(), max_interior.value_or(pts.size()));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= limit; ++k) {
    for_each_subset(pts.size(), k, [&](std::vector<std::size_t> s) {
      do {
        std::vector<Point> v{region.lower()};
        for (auto i : s) v.push_back(pts.point(i));
        v.push_back(region.upper());
        if (oriented) {
          bool ok = true;
          for (std::size_t i = 1; i < v.size(); ++i) ok = ok && v[i - 1][1] < v[i][1];
          if (!ok) continue;
        }
        best = std::min(best, chain(v) / static_cast<double>(v.size() - 1));
      } while (std::next_permutation(s.begin(), s.end()));
    });
  }
  return best;
}

/// Uniform points in [0, side]^d drawn from the synthetic substream.
inline PointSet random_instance(std::size_t n, std::size_t d, double side, std::uint64_t seed, std::uint64_t rep) {
  minratio::Philox rng({seed, rep, minratio::substream::kSynthetic});
  std::vector<double> flat;
  for (std::size_t i = 0; i < n * d; ++i) flat.push_back(side * rng.uniform());
  return PointSet(minratio::Region::cube(d, side), std::move(flat), {});
}

}  // namespace oracle
