#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "minratio/errors.hpp"
#include "minratio/rng.hpp"

namespace minratio {

/// Euclidean distance, summed in coordinate order. Every length in the
/// library goes through this function so that independently computed path
/// lengths agree bit for bit.
inline double distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

struct Point {
  std::vector<double> coords;

  Point() = default;
  explicit Point(std::vector<double> c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(c) {}

  std::size_t dim() const noexcept { return coords.size(); }
  std::span<const double> span() const noexcept { return coords; }
  double operator[](std::size_t k) const { return coords[k]; }

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) { return distance(a.span(), b.span()); }

/// Axis-aligned closed box.
class Region {
 public:
  Region(Point lower, std::vector<double> sides) : lower_(std::move(lower)), sides_(std::move(sides)) {
    if (lower_.dim() != sides_.size()) throw InvalidArgument("region: lower corner and sides differ in dimension");
    if (sides_.empty()) throw InvalidArgument("region: zero dimension");
    for (double s : sides_) {
      if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("region: side lengths must be positive and finite");
    }
  }

  /// [0, side]^dim
  static Region cube(std::size_t dim, double side) {
    return Region(Point(std::vector<double>(dim, 0.0)), std::vector<double>(dim, side));
  }

  /// [lower, lower + side]^dim
  static Region cube(Point lower, double side) {
    const std::size_t d = lower.dim();
    return Region(std::move(lower), std::vector<double>(d, side));
  }

  std::size_t dim() const noexcept { return sides_.size(); }
  const Point& lower() const noexcept { return lower_; }
  const std::vector<double>& sides() const noexcept { return sides_; }

  Point upper() const {
    std::vector<double> u(dim());
    for (std::size_t k = 0; k < dim(); ++k) u[k] = lower_[k] + sides_[k];
    return Point(std::move(u));
  }

  double volume() const noexcept {
    double v = 1.0;
    for (double s : sides_) v *= s;
    return v;
  }

  bool is_cube() const noexcept {
    for (double s : sides_) {
      if (s != sides_.front()) return false;
    }
    return true;
  }

  bool contains(std::span<const double> p) const noexcept {
    for (std::size_t k = 0; k < dim(); ++k) {
      if (p[k] < lower_[k] || p[k] > lower_[k] + sides_[k]) return false;
    }
    return true;
  }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  Point lower_;
  std::vector<double> sides_;
};

enum class SourceKind { poisson, uniform, fixture };

struct Provenance {
  SourceKind kind = SourceKind::fixture;
  double rate_or_n = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

/// Immutable indexed point cloud in a box. Coordinates are stored flat.
class PointSet {
 public:
  PointSet(Region region, std::vector<double> flat_coords, Provenance provenance)
      : region_(std::move(region)), coords_(std::move(flat_coords)), provenance_(provenance) {
    const std::size_t d = region_.dim();
    if (d < 2) throw InvalidArgument("point set: dimension must be at least 2");
    if (coords_.size() % d != 0) throw InvalidArgument("point set: coordinate count not a multiple of dimension");
    for (std::size_t i = 0; i < size(); ++i) {
      if (!region_.contains((*this)[i])) {
        throw InvalidArgument("point set: point " + std::to_string(i) + " lies outside its region");
      }
    }
  }

  PointSet(Region region, const std::vector<Point>& pts, Provenance provenance = {})
      : PointSet(region, flatten(region.dim(), pts), provenance) {}

  std::size_t dim() const noexcept { return region_.dim(); }
  std::size_t size() const noexcept { return coords_.size() / region_.dim(); }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const noexcept {
    return std::span<const double>(coords_).subspan(i * dim(), dim());
  }

  Point point(std::size_t i) const {
    auto s = (*this)[i];
    return Point(std::vector<double>(s.begin(), s.end()));
  }

  const Region& region() const noexcept { return region_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::span<const double> flat() const noexcept { return coords_; }

  friend bool operator==(const PointSet& a, const PointSet& b) {
    return a.region_ == b.region_ && a.coords_ == b.coords_;
  }

 private:
  static std::vector<double> flatten(std::size_t d, const std::vector<Point>& pts) {
    std::vector<double> flat;
    flat.reserve(pts.size() * d);
    for (const auto& p : pts) {
      if (p.dim() != d) throw InvalidArgument("point set: point dimension mismatch");
      flat.insert(flat.end(), p.coords.begin(), p.coords.end());
    }
    return flat;
  }

  Region region_;
  std::vector<double> coords_;
  Provenance provenance_;
};

namespace detail {
inline void fill_uniform(const Region& region, std::size_t count, Philox& rng, std::vector<double>& out) {
  const std::size_t d = region.dim();
  out.reserve(out.size() + count * d);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      out.push_back(region.lower()[k] + region.sides()[k] * rng.uniform());
    }
  }
}
}  // namespace detail

/// Poisson process of the given rate in `region`, drawn from stream (seed, replicate).
inline PointSet sample_poisson(const Region& region, double rate, std::uint64_t seed, std::uint64_t replicate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidArgument("sample_poisson: rate must be positive");
  if (region.dim() < 2) throw InvalidArgument("sample_poisson: dimension must be at least 2");
  Philox rng({seed, replicate, substream::kSampling});
  const auto count = sample_poisson_count(rate * region.volume(), rng);
  std::vector<double> coords;
  detail::fill_uniform(region, count, rng, coords);
  return PointSet(region, std::move(coords), {SourceKind::poisson, rate, seed, replicate});
}

/// Exactly n i.i.d. uniform points in `region`.
inline PointSet sample_uniform(long long n, const Region& region, std::uint64_t seed, std::uint64_t replicate) {
  if (n < 0) throw InvalidArgument("sample_uniform: n must be non-negative");
  if (region.dim() < 2) throw InvalidArgument("sample_uniform: dimension must be at least 2");
  Philox rng({seed, replicate, substream::kSampling});
  std::vector<double> coords;
  detail::fill_uniform(region, static_cast<std::size_t>(n), rng, coords);
  return PointSet(region, std::move(coords), {SourceKind::uniform, static_cast<double>(n), seed, replicate});
}

/// The two diagonal corners of a PointSet's region, usable as path endpoints.
enum class Corner { lower, upper };

using PathRef = std::variant<std::size_t, Corner>;

inline Point resolve(const PointSet& points, const PathRef& ref) {
  if (const auto* c = std::get_if<Corner>(&ref)) {
    return *c == Corner::lower ? points.region().lower() : points.region().upper();
  }
  return points.point(std::get<std::size_t>(ref));
}

/// Sum of consecutive distances along `order`, plus the wrap edge when closed.
inline double path_length(const PointSet& points, std::span<const PathRef> order, bool closed) {
  std::unordered_set<std::size_t> seen;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (const auto* idx = std::get_if<std::size_t>(&order[i])) {
      if (*idx >= points.size()) throw InvalidArgument("path_length: index out of range");
      if (!seen.insert(*idx).second) {
        throw InvalidArgument("path_length: repeated point index " + std::to_string(*idx));
      }
    } else {
      const bool at_end = i == 0 || i + 1 == order.size();
      if (closed || !at_end) throw InvalidArgument("path_length: named corners are only allowed at open path ends");
    }
  }
  if (order.size() < 2) return 0.0;
  std::vector<Point> resolved;
  resolved.reserve(order.size());
  for (const auto& r : order) resolved.push_back(resolve(points, r));
  double total = 0.0;
  for (std::size_t i = 1; i < resolved.size(); ++i) total += distance(resolved[i - 1], resolved[i]);
  if (closed) total += distance(resolved.back(), resolved.front());
  return total;
}

inline double path_length(const PointSet& points, std::span<const std::size_t> order, bool closed) {
  std::vector<PathRef> refs(order.begin(), order.end());
  return path_length(points, refs, closed);
}

}  // namespace minratio
