#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "minratio/points.hpp"

namespace minratio {

/// Uniform bucket grid over a PointSet's region, used for k-nearest-neighbour
/// candidate lists.
class BucketGrid {
 public:
  explicit BucketGrid(const PointSet& points, double per_cell = 2.0) : points_(&points) {
    const std::size_t d = points.dim();
    const auto& region = points.region();
    const double n = std::max<double>(1.0, static_cast<double>(points.size()));
    const double target_cells = std::max(1.0, n / per_cell);
    const double cell = std::pow(region.volume() / target_cells, 1.0 / static_cast<double>(d));
    cells_.resize(d);
    width_.resize(d);
    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) {
      cells_[k] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(region.sides()[k] / cell)));
      width_[k] = region.sides()[k] / static_cast<double>(cells_[k]);
      total *= cells_[k];
    }
    start_.assign(total + 1, 0);
    std::vector<std::size_t> cell_of(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cell_of[i] = flat_cell(points[i]);
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
    items_.resize(points.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points.size(); ++i) items_[fill[cell_of[i]]++] = i;
  }

  /// Indices of the k nearest other points to point i, nearest first.
  std::vector<std::size_t> nearest(std::size_t i, std::size_t k) const {
    return nearest_to((*points_)[i], k, i);
  }

  /// k nearest points to an arbitrary location, excluding index `skip`.
  std::vector<std::size_t> nearest_to(std::span<const double> q, std::size_t k,
                                      std::size_t skip = static_cast<std::size_t>(-1)) const {
    const std::size_t d = cells_.size();
    std::vector<long> centre(d);
    for (std::size_t j = 0; j < d; ++j) centre[j] = static_cast<long>(coord_cell(q, j));
    std::vector<std::pair<double, std::size_t>> found;
    const std::size_t available = points_->size() - (skip < points_->size() ? 1 : 0);
    k = std::min(k, available);
    if (k == 0) return {};
    long max_ring = 0;
    for (std::size_t j = 0; j < d; ++j) max_ring = std::max(max_ring, static_cast<long>(cells_[j]));
    double min_width = width_[0];
    for (double w : width_) min_width = std::min(min_width, w);
    for (long ring = 0; ring <= max_ring; ++ring) {
      visit_shell(centre, ring, [&](std::size_t cell) {
        for (std::size_t t = start_[cell]; t < start_[cell + 1]; ++t) {
          const std::size_t idx = items_[t];
          if (idx == skip) continue;
          found.emplace_back(distance(q, (*points_)[idx]), idx);
        }
      });
      if (found.size() >= k) {
        std::nth_element(found.begin(), found.begin() + static_cast<long>(k - 1), found.end());
        // Everything outside the scanned shells is at least ring * width away.
        if (found[k - 1].first <= static_cast<double>(ring) * min_width) break;
      }
    }
    std::sort(found.begin(), found.end());
    found.resize(k);
    std::vector<std::size_t> out;
    out.reserve(k);
    for (const auto& f : found) out.push_back(f.second);
    return out;
  }

 private:
  std::size_t coord_cell(std::span<const double> p, std::size_t j) const {
    const double rel = (p[j] - points_->region().lower()[j]) / width_[j];
    const long c = static_cast<long>(std::floor(rel));
    return static_cast<std::size_t>(std::clamp<long>(c, 0, static_cast<long>(cells_[j]) - 1));
  }

  std::size_t flat_cell(std::span<const double> p) const {
    std::size_t flat = 0;
    for (std::size_t j = cells_.size(); j-- > 0;) flat = flat * cells_[j] + coord_cell(p, j);
    return flat;
  }

  template <class Fn>
  void visit_shell(const std::vector<long>& centre, long ring, Fn&& fn) const {
    const std::size_t d = cells_.size();
    std::vector<long> offset(d, -ring);
    while (true) {
      bool on_shell = false;
      bool inside = true;
      std::size_t flat = 0;
      for (std::size_t j = d; j-- > 0;) {
        if (std::labs(offset[j]) == ring) on_shell = true;
        const long c = centre[j] + offset[j];
        if (c < 0 || c >= static_cast<long>(cells_[j])) {
          inside = false;
          break;
        }
        flat = flat * cells_[j] + static_cast<std::size_t>(c);
      }
      if (inside && on_shell) fn(flat);
      std::size_t j = 0;
      while (j < d && offset[j] == ring) offset[j++] = -ring;
      if (j == d) break;
      ++offset[j];
    }
  }

  const PointSet* points_;
  std::vector<std::size_t> cells_;
  std::vector<double> width_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> items_;
};

/// k-nearest-neighbour candidate lists for every point.
inline std::vector<std::vector<std::size_t>> neighbor_lists(const PointSet& points, std::size_t k) {
  BucketGrid grid(points);
  std::vector<std::vector<std::size_t>> lists(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) lists[i] = grid.nearest(i, k);
  return lists;
}

}  // namespace minratio
