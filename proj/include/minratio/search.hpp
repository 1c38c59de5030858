#pragma once

// Heuristic solvers and explicit path constructions.
//
//  * local_search_k_cycle: shortest cycle through exactly m of n points
//    (2-opt, or-opt, swap-in/swap-out, local double-bridge kicks).
//  * dinkelbach_search: minimum average-edge-length corner-to-corner path by
//    parametric iteration c <- w(incumbent) on the objective l - c*m + c.
//  * greedy_diagonal / concatenate_paths: explicit path constructions.
//  * oriented_path_search: the y-increasing variant, solved exactly per
//    parameter by dynamic programming over points sorted by height.
//  * heuristic_origin_path / branch_and_bound_origin_path: T_m solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "minratio/errors.hpp"
#include "minratio/exact.hpp"
#include "minratio/points.hpp"
#include "minratio/rng.hpp"
#include "minratio/spatial.hpp"

namespace minratio {

struct SearchOptions {
  bool two_opt = true;
  bool or_opt = true;
  bool swap = true;
  /// Consecutive non-improving perturbation kicks before a restart ends.
  std::size_t max_stagnation = 30;
  std::size_t restarts = 2;
  StreamId stream{};
  std::size_t neighbors = 10;
  /// Dinkelbach iteration cap and stopping tolerance on the ratio decrease.
  std::size_t max_iterations = 200;
  double tolerance = 1e-9;
  /// Instances up to this size use the exact inner solver.
  std::size_t exact_cap = kDefaultExactCap;
  bool allow_exact_inner = true;

  void validate() const {
    if (!two_opt && !or_opt && !swap) throw InvalidArgument("search options: no move enabled");
    if (restarts < 1) throw InvalidArgument("search options: restarts must be at least 1");
    if (neighbors < 1) throw InvalidArgument("search options: neighbour list size must be positive");
  }
};

/// One Dinkelbach iterate.
struct DinkelbachState {
  double c = 0.0;
  RatioPath incumbent;
  double transform = 0.0;  // l - c*m + c of the incumbent
  std::size_t iteration = 0;
};

struct DinkelbachResult {
  RatioPath path;
  std::vector<DinkelbachState> trace;
  /// min over paths of l - c*m + c at the terminal c (as seen by the inner solver).
  double terminal_transform = 0.0;
  bool exact_inner = false;
};

namespace detail {

inline constexpr double kEps = 1e-12;
inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Cycle local search over a chosen subset.

class CycleImprover {
 public:
  CycleImprover(const PointSet& points, const std::vector<std::vector<std::size_t>>& nbrs, const SearchOptions& opts)
      : pts_(points), nbrs_(nbrs), opts_(opts), pos_(points.size(), kNone) {}

  void set_tour(std::vector<std::size_t> order) {
    order_ = std::move(order);
    std::fill(pos_.begin(), pos_.end(), kNone);
    for (std::size_t i = 0; i < order_.size(); ++i) pos_[order_[i]] = i;
  }

  const std::vector<std::size_t>& tour() const noexcept { return order_; }

  double length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < order_.size(); ++i) total += d(order_[i - 1], order_[i]);
    if (order_.size() > 1) total += d(order_.back(), order_.front());
    return total;
  }

  void optimize() {
    if (order_.size() < 3) return;
    while (true) {
      bool any = false;
      if (opts_.two_opt && order_.size() >= 4) any |= two_opt_pass();
      if (opts_.or_opt && order_.size() >= 5) any |= or_opt_pass();
      if (opts_.swap && order_.size() < pts_.size()) any |= swap_pass();
      if (!any) break;
    }
  }

  /// Local double bridge: three short consecutive segments starting at a
  /// random position are reordered A B C D -> A C B D.
  void kick(Philox& rng) {
    const std::size_t m = order_.size();
    if (m < 8) return;
    const std::size_t span = std::min<std::size_t>(30, (m - 1) / 3);
    const std::size_t start = rng.below(m);
    const std::size_t l1 = 1 + rng.below(span);
    const std::size_t l2 = 1 + rng.below(span);
    std::vector<std::size_t> rotated(m);
    for (std::size_t i = 0; i < m; ++i) rotated[i] = order_[(start + i) % m];
    std::vector<std::size_t> next;
    next.reserve(m);
    next.push_back(rotated[0]);
    const std::size_t b = 1 + l1;
    const std::size_t c = b + l2;
    next.insert(next.end(), rotated.begin() + static_cast<long>(b), rotated.begin() + static_cast<long>(c));
    next.insert(next.end(), rotated.begin() + 1, rotated.begin() + static_cast<long>(b));
    next.insert(next.end(), rotated.begin() + static_cast<long>(c), rotated.end());
    set_tour(std::move(next));
  }

 private:
  double d(std::size_t a, std::size_t b) const { return distance(pts_[a], pts_[b]); }
  bool selected(std::size_t v) const { return pos_[v] != kNone; }
  std::size_t succ(std::size_t v) const { return order_[(pos_[v] + 1) % order_.size()]; }
  std::size_t pred(std::size_t v) const { return order_[(pos_[v] + order_.size() - 1) % order_.size()]; }

  // Reverses tour positions i..j (forward, cyclic), or the complementary
  // stretch when that is shorter; both give the same undirected cycle.
  void reverse(std::size_t i, std::size_t j) {
    const std::size_t m = order_.size();
    std::size_t len = (j + m - i) % m + 1;
    if (2 * len > m) {
      const std::size_t ni = (j + 1) % m;
      const std::size_t nj = (i + m - 1) % m;
      i = ni;
      j = nj;
      len = m - len;
    }
    for (std::size_t t = 0; t < len / 2; ++t) {
      const std::size_t a = (i + t) % m;
      const std::size_t b = (j + m - t) % m;
      std::swap(order_[a], order_[b]);
      pos_[order_[a]] = a;
      pos_[order_[b]] = b;
    }
  }

  bool two_opt_pass() {
    bool improved = false;
    for (std::size_t idx = 0; idx < order_.size(); ++idx) {
      const std::size_t a = order_[idx];
      for (int dir = 0; dir < 2; ++dir) {
        const std::size_t b = dir == 0 ? succ(a) : pred(a);
        const double dab = d(a, b);
        bool moved = false;
        for (std::size_t c : nbrs_[a]) {
          if (!selected(c)) continue;
          const double dac = d(a, c);
          if (dac >= dab) break;
          const std::size_t e = dir == 0 ? succ(c) : pred(c);
          if (c == b || e == a) continue;
          const double delta = dac + d(b, e) - dab - d(c, e);
          if (delta < -kEps) {
            if (dir == 0) {
              reverse(pos_[b], pos_[c]);
            } else {
              reverse(pos_[c], pos_[b]);
            }
            improved = moved = true;
            break;
          }
        }
        if (moved) break;
      }
    }
    return improved;
  }

  bool or_opt_pass() {
    bool improved = false;
    const std::size_t m = order_.size();
    for (std::size_t idx = 0; idx < order_.size(); ++idx) {
      for (std::size_t seg = 1; seg <= 3 && seg + 2 < m; ++seg) {
        const std::size_t s1 = order_[idx];
        const std::size_t s2 = order_[(idx + seg - 1) % m];
        const std::size_t p = pred(s1);
        const std::size_t nx = succ(s2);
        const double gain = d(p, s1) + d(s2, nx) - d(p, nx);
        if (gain <= kEps) continue;
        auto in_segment = [&](std::size_t v) { return (pos_[v] + m - idx) % m < seg; };
        double best = -kEps;
        std::size_t best_x = kNone;
        bool best_flip = false;
        for (std::size_t end : {s1, s2}) {
          for (std::size_t c : nbrs_[end]) {
            if (!selected(c) || in_segment(c)) continue;
            if (d(end, c) >= gain) break;
            for (std::size_t x : {pred(c), c}) {
              const std::size_t y = succ(x);
              if (in_segment(x) || in_segment(y)) continue;
              const double base = d(x, y);
              const double fwd = d(x, s1) + d(s2, y) - base - gain;
              const double rev = d(x, s2) + d(s1, y) - base - gain;
              if (fwd < best) {
                best = fwd;
                best_x = x;
                best_flip = false;
              }
              if (rev < best) {
                best = rev;
                best_x = x;
                best_flip = true;
              }
            }
          }
        }
        if (best_x != kNone) {
          move_segment(idx, seg, best_x, best_flip);
          improved = true;
          break;
        }
      }
    }
    return improved;
  }

  void move_segment(std::size_t idx, std::size_t seg, std::size_t after, bool flip) {
    const std::size_t m = order_.size();
    std::vector<std::size_t> segment(seg);
    for (std::size_t t = 0; t < seg; ++t) segment[t] = order_[(idx + t) % m];
    if (flip) std::reverse(segment.begin(), segment.end());
    std::vector<std::size_t> next;
    next.reserve(m);
    for (std::size_t t = seg; t < m; ++t) {
      const std::size_t v = order_[(idx + t) % m];
      next.push_back(v);
      if (v == after) next.insert(next.end(), segment.begin(), segment.end());
    }
    set_tour(std::move(next));
  }

  double removal_gain(std::size_t r) const {
    const std::size_t p = pred(r);
    const std::size_t s = succ(r);
    return d(p, r) + d(r, s) - d(p, s);
  }

  bool swap_pass() {
    bool improved = false;
    const std::size_t m = order_.size();
    if (m < 3) return false;
    auto top_removals = [&] {
      std::vector<std::pair<double, std::size_t>> gains;
      gains.reserve(m);
      for (std::size_t r : order_) gains.emplace_back(removal_gain(r), r);
      const std::size_t keep = std::min<std::size_t>(8, gains.size());
      std::partial_sort(gains.begin(), gains.begin() + static_cast<long>(keep), gains.end(),
                        [](const auto& x, const auto& y) { return x.first > y.first || (x.first == y.first && x.second < y.second); });
      gains.resize(keep);
      return gains;
    };
    auto top = top_removals();
    for (std::size_t q = 0; q < pts_.size(); ++q) {
      if (selected(q)) continue;
      // Replace a nearby selected point by q in place.
      bool done = false;
      for (std::size_t c : nbrs_[q]) {
        if (!selected(c)) continue;
        const std::size_t p = pred(c);
        const std::size_t s = succ(c);
        const double delta = d(p, q) + d(q, s) - d(p, c) - d(c, s);
        if (delta < -kEps) {
          const std::size_t at = pos_[c];
          order_[at] = q;
          pos_[c] = kNone;
          pos_[q] = at;
          improved = done = true;
          break;
        }
      }
      if (done) {
        top = top_removals();
        continue;
      }
      // Insert q at its cheapest nearby edge and drop the most expensive point.
      double ins = std::numeric_limits<double>::infinity();
      std::size_t ins_x = kNone;
      for (std::size_t c : nbrs_[q]) {
        if (!selected(c)) continue;
        for (std::size_t x : {pred(c), c}) {
          const std::size_t y = succ(x);
          const double cost = d(x, q) + d(q, y) - d(x, y);
          if (cost < ins) {
            ins = cost;
            ins_x = x;
          }
        }
      }
      if (ins_x == kNone) continue;
      const std::size_t ins_y = succ(ins_x);
      for (const auto& [gain, r] : top) {
        if (r == ins_x || r == ins_y) continue;
        if (ins - gain < -kEps) {
          std::vector<std::size_t> next;
          next.reserve(m);
          for (std::size_t v : order_) {
            if (v == r) continue;
            next.push_back(v);
            if (v == ins_x) next.push_back(q);
          }
          set_tour(std::move(next));
          improved = true;
          top = top_removals();
          break;
        }
      }
    }
    return improved;
  }

  const PointSet& pts_;
  const std::vector<std::vector<std::size_t>>& nbrs_;
  const SearchOptions& opts_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> pos_;
};

inline std::vector<std::size_t> nearest_neighbor_tour(const PointSet& points, std::size_t start) {
  const std::size_t n = points.size();
  std::vector<char> used(n, 0);
  std::vector<std::size_t> tour;
  tour.reserve(n);
  std::size_t cur = start;
  used[cur] = 1;
  tour.push_back(cur);
  for (std::size_t step = 1; step < n; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = kNone;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double dj = distance(points[cur], points[j]);
      if (dj < best) {
        best = dj;
        arg = j;
      }
    }
    cur = arg;
    used[cur] = 1;
    tour.push_back(cur);
  }
  return tour;
}

/// Drops points from a full tour, largest shortcut saving first, until m remain.
inline std::vector<std::size_t> prune_tour(const PointSet& points, std::vector<std::size_t> tour, std::size_t m) {
  const std::size_t n = tour.size();
  std::vector<std::size_t> prev(n), next(n);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = (i + n - 1) % n;
    next[i] = (i + 1) % n;
  }
  auto gain = [&](std::size_t i) {
    return distance(points[tour[prev[i]]], points[tour[i]]) + distance(points[tour[i]], points[tour[next[i]]]) -
           distance(points[tour[prev[i]]], points[tour[next[i]]]);
  };
  std::vector<std::uint32_t> version(n, 0);
  std::vector<char> alive(n, 1);
  using Entry = std::tuple<double, std::size_t, std::uint32_t>;
  auto cmp = [](const Entry& a, const Entry& b) {
    return std::get<0>(a) < std::get<0>(b) || (std::get<0>(a) == std::get<0>(b) && std::get<1>(a) > std::get<1>(b));
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (std::size_t i = 0; i < n; ++i) heap.emplace(gain(i), i, 0);
  std::size_t remaining = n;
  while (remaining > m && !heap.empty()) {
    auto [g, i, ver] = heap.top();
    heap.pop();
    if (!alive[i] || ver != version[i]) continue;
    alive[i] = 0;
    --remaining;
    const std::size_t p = prev[i];
    const std::size_t q = next[i];
    next[p] = q;
    prev[q] = p;
    if (remaining > 2) {
      heap.emplace(gain(p), p, ++version[p]);
      heap.emplace(gain(q), q, ++version[q]);
    }
  }
  std::vector<std::size_t> out;
  out.reserve(m);
  std::size_t start = 0;
  while (!alive[start]) ++start;
  std::size_t cur = start;
  do {
    out.push_back(tour[cur]);
    cur = next[cur];
  } while (cur != start);
  return out;
}

/// Grows a cycle from `seed` by cheapest insertion of neighbouring points.
inline std::vector<std::size_t> grow_cycle(const PointSet& points, const std::vector<std::vector<std::size_t>>& nbrs,
                                           std::size_t seed, std::size_t m) {
  const std::size_t n = points.size();
  std::vector<std::size_t> cycle{seed};
  std::vector<char> in(n, 0);
  in[seed] = 1;
  BucketGrid grid(points);
  std::vector<char> frontier_flag(n, 0);
  std::vector<std::size_t> frontier;
  auto add_frontier = [&](std::size_t v) {
    for (std::size_t u : nbrs[v]) {
      if (!in[u] && !frontier_flag[u]) {
        frontier_flag[u] = 1;
        frontier.push_back(u);
      }
    }
  };
  add_frontier(seed);
  while (cycle.size() < m) {
    if (frontier.empty()) {
      // Disconnected neighbour graph: fall back to the nearest outside point.
      for (std::size_t k = 2 * nbrs[seed].size() + 2;; k *= 2) {
        bool found = false;
        for (std::size_t u : grid.nearest(seed, std::min(k, n - 1))) {
          if (!in[u]) {
            frontier_flag[u] = 1;
            frontier.push_back(u);
            found = true;
            break;
          }
        }
        if (found || k >= n) break;
      }
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    std::size_t at = 0;
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const std::size_t q = frontier[f];
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        const std::size_t x = cycle[i];
        const std::size_t y = cycle[(i + 1) % cycle.size()];
        const double cost = cycle.size() == 1 ? 2.0 * distance(points[x], points[q])
                                              : distance(points[x], points[q]) + distance(points[q], points[y]) -
                                                    distance(points[x], points[y]);
        if (cost < best) {
          best = cost;
          arg = f;
          at = i;
        }
      }
    }
    const std::size_t q = frontier[arg];
    frontier.erase(frontier.begin() + static_cast<long>(arg));
    cycle.insert(cycle.begin() + static_cast<long>(at) + 1, q);
    in[q] = 1;
    add_frontier(q);
  }
  return cycle;
}

inline std::vector<std::size_t> rotate_to_min(std::vector<std::size_t> order) {
  if (order.empty()) return order;
  auto it = std::min_element(order.begin(), order.end());
  std::rotate(order.begin(), it, order.end());
  return order;
}

}  // namespace detail

/// Heuristic shortest cycle through exactly m of the points; the length is an
/// upper bound on the optimum.
inline CycleSolution local_search_k_cycle(const PointSet& points, std::size_t m, const SearchOptions& opts = {}) {
  opts.validate();
  const std::size_t n = points.size();
  if (m < 3) throw InvalidArgument("local_search_k_cycle: m must be at least 3");
  if (m > n) throw InfeasibleError("local_search_k_cycle: m exceeds the number of points");

  const auto nbrs = neighbor_lists(points, std::min(opts.neighbors, n - 1));
  Philox rng(opts.stream.substream == substream::kSampling
                 ? StreamId{opts.stream.seed, opts.stream.replicate, substream::kSearch}
                 : opts.stream);
  detail::CycleImprover improver(points, nbrs, opts);

  std::vector<std::size_t> full_tour;
  double best_len = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_tour;
  for (std::size_t restart = 0; restart < opts.restarts; ++restart) {
    std::vector<std::size_t> start;
    if (m == n) {
      start = detail::nearest_neighbor_tour(points, restart == 0 ? 0 : rng.below(n));
    } else if (restart == 0) {
      if (full_tour.empty()) {
        improver.set_tour(detail::nearest_neighbor_tour(points, 0));
        improver.optimize();
        full_tour = improver.tour();
      }
      start = detail::prune_tour(points, full_tour, m);
    } else {
      start = detail::grow_cycle(points, nbrs, rng.below(n), m);
    }
    improver.set_tour(std::move(start));
    improver.optimize();
    double cur = improver.length();
    std::size_t stagnant = 0;
    while (stagnant < opts.max_stagnation && m >= 8) {
      const auto saved = improver.tour();
      improver.kick(rng);
      improver.optimize();
      const double len = improver.length();
      if (len < cur - detail::kEps) {
        cur = len;
        stagnant = 0;
      } else {
        improver.set_tour(saved);
        ++stagnant;
      }
    }
    if (cur < best_len) {
      best_len = cur;
      best_tour = improver.tour();
    }
  }
  CycleSolution sol;
  sol.order = detail::rotate_to_min(std::move(best_tour));
  sol.m = m;
  sol.length = path_length(points, std::span<const std::size_t>(sol.order), true);
  sol.optimal = false;
  return sol;
}

namespace detail {

// ---------------------------------------------------------------------------
// Open-path local search. Node ids 0..n-1 are points, n is the start anchor,
// n+1 the end anchor (absent for free-end paths).

class PathImprover {
 public:
  enum class Mode { penalised, fixed_size };

  PathImprover(const PointSet& points, Point start, std::optional<Point> end, const SearchOptions& opts)
      : pts_(points), start_(std::move(start)), end_(std::move(end)), opts_(opts), pos_(points.size(), kNone) {
    const std::size_t n = points.size();
    if (n > 1) nbrs_ = neighbor_lists(points, std::min(opts.neighbors, n - 1));
    else nbrs_.assign(n, {});
  }

  void set_path(const std::vector<std::size_t>& interior) {
    seq_.clear();
    seq_.push_back(start_id());
    seq_.insert(seq_.end(), interior.begin(), interior.end());
    if (end_) seq_.push_back(end_id());
    rebuild();
  }

  std::vector<std::size_t> interior() const {
    const std::size_t stop = end_ ? seq_.size() - 1 : seq_.size();
    return std::vector<std::size_t>(seq_.begin() + 1, seq_.begin() + static_cast<long>(stop));
  }

  double length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < seq_.size(); ++i) total += d(seq_[i - 1], seq_[i]);
    return total;
  }

  /// Minimises length - penalty * edges, inserting and deleting points.
  void optimize_penalised(double penalty, std::size_t max_interior) {
    mode_ = Mode::penalised;
    penalty_ = penalty;
    limit_ = max_interior;
    run();
  }

  /// Minimises length with the number of points held fixed.
  void optimize_fixed() {
    mode_ = Mode::fixed_size;
    run();
  }

 private:
  std::size_t start_id() const { return pts_.size(); }
  std::size_t end_id() const { return pts_.size() + 1; }

  std::span<const double> at(std::size_t id) const {
    if (id < pts_.size()) return pts_[id];
    return id == start_id() ? start_.span() : end_->span();
  }
  double d(std::size_t a, std::size_t b) const { return distance(at(a), at(b)); }
  bool selected(std::size_t v) const { return pos_[v] != kNone; }
  std::size_t interior_count() const { return seq_.size() - 1 - (end_ ? 1 : 0); }
  bool is_last(std::size_t i) const { return i + 1 == seq_.size(); }

  void rebuild() {
    std::fill(pos_.begin(), pos_.end(), kNone);
    for (std::size_t i = 1; i < seq_.size(); ++i) {
      if (seq_[i] < pts_.size()) pos_[seq_[i]] = i;
    }
  }

  void run() {
    while (true) {
      bool any = false;
      if (opts_.two_opt) any |= two_opt_pass();
      if (mode_ == Mode::penalised) {
        any |= delete_pass();
        any |= insert_pass();
      }
      if (opts_.or_opt) any |= relocate_pass();
      if (opts_.swap) any |= swap_pass();
      if (!any) break;
    }
  }

  bool two_opt_pass() {
    bool improved = false;
    for (std::size_t i = 0; i + 1 < seq_.size(); ++i) {
      const std::size_t a = seq_[i];
      if (a >= pts_.size()) continue;
      // Forward: edges (a, b=seq[i+1]) and (c, e=seq[j+1]) -> (a, c), (b, e).
      {
        const std::size_t b = seq_[i + 1];
        const double dab = d(a, b);
        for (std::size_t c : nbrs_[a]) {
          if (!selected(c)) continue;
          const double dac = d(a, c);
          if (dac >= dab) break;
          const std::size_t j = pos_[c];
          if (j <= i + 1) continue;
          const double delta = is_last(j) ? dac - dab : dac + d(b, seq_[j + 1]) - dab - d(c, seq_[j + 1]);
          if (delta < -kEps) {
            std::reverse(seq_.begin() + static_cast<long>(i + 1), seq_.begin() + static_cast<long>(j + 1));
            rebuild();
            improved = true;
            break;
          }
        }
      }
      // Backward: edges (b=seq[i-1], a) and (e=seq[j-1], c) -> (e, b), (c, a).
      if (i >= 1) {
        const std::size_t b = seq_[i - 1];
        const double dab = d(a, b);
        for (std::size_t c : nbrs_[a]) {
          if (!selected(c)) continue;
          const double dac = d(a, c);
          if (dac >= dab) break;
          const std::size_t j = pos_[c];
          if (j + 1 >= i || j < 1) continue;
          const std::size_t e = seq_[j - 1];
          const double delta = dac + d(b, e) - dab - d(c, e);
          if (delta < -kEps) {
            std::reverse(seq_.begin() + static_cast<long>(j), seq_.begin() + static_cast<long>(i));
            rebuild();
            improved = true;
            break;
          }
        }
      }
    }
    return improved;
  }

  // Cheapest insertion of q next to one of its selected neighbours or the
  // anchor edges. Returns (cost, position to insert before).
  std::pair<double, std::size_t> best_insertion(std::size_t q, std::size_t skip = kNone) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t where = kNone;
    auto consider = [&](std::size_t i) {  // insert between seq[i-1] and seq[i]
      if (i == 0 || i > seq_.size()) return;
      if (i < seq_.size() && (seq_[i] == skip || seq_[i - 1] == skip)) return;
      double cost;
      if (i == seq_.size()) {
        if (end_ || seq_.back() == skip) return;
        cost = d(seq_.back(), q);
      } else {
        cost = d(seq_[i - 1], q) + d(q, seq_[i]) - d(seq_[i - 1], seq_[i]);
      }
      if (cost < best) {
        best = cost;
        where = i;
      }
    };
    consider(1);
    consider(end_ ? seq_.size() - 1 : seq_.size());
    for (std::size_t c : nbrs_[q]) {
      if (!selected(c) || c == skip) continue;
      consider(pos_[c]);
      consider(pos_[c] + 1);
    }
    return {best, where};
  }

  double removal_gain(std::size_t i) const {
    if (is_last(i)) return d(seq_[i - 1], seq_[i]);
    return d(seq_[i - 1], seq_[i]) + d(seq_[i], seq_[i + 1]) - d(seq_[i - 1], seq_[i + 1]);
  }

  bool insert_pass() {
    bool improved = false;
    for (std::size_t q = 0; q < pts_.size(); ++q) {
      if (selected(q) || interior_count() >= limit_) continue;
      auto [cost, where] = best_insertion(q);
      if (where != kNone && cost - penalty_ < -kEps) {
        seq_.insert(seq_.begin() + static_cast<long>(where), q);
        rebuild();
        improved = true;
      }
    }
    return improved;
  }

  bool delete_pass() {
    bool improved = false;
    for (std::size_t i = 1; i < seq_.size();) {
      if (seq_[i] >= pts_.size()) {
        ++i;
        continue;
      }
      if (-removal_gain(i) + penalty_ < -kEps) {
        seq_.erase(seq_.begin() + static_cast<long>(i));
        rebuild();
        improved = true;
      } else {
        ++i;
      }
    }
    return improved;
  }

  bool relocate_pass() {
    bool improved = false;
    for (std::size_t i = 1; i < seq_.size(); ++i) {
      const std::size_t p = seq_[i];
      if (p >= pts_.size()) continue;
      const double gain = removal_gain(i);
      if (gain <= kEps) continue;
      std::vector<std::size_t> trial = seq_;
      trial.erase(trial.begin() + static_cast<long>(i));
      std::swap(seq_, trial);
      rebuild();
      auto [cost, where] = best_insertion(p);
      if (where != kNone && cost - gain < -kEps) {
        seq_.insert(seq_.begin() + static_cast<long>(where), p);
        rebuild();
        improved = true;
      } else {
        std::swap(seq_, trial);
        rebuild();
      }
    }
    return improved;
  }

  bool swap_pass() {
    bool improved = false;
    for (std::size_t q = 0; q < pts_.size(); ++q) {
      if (selected(q)) continue;
      // In-place replacement of a nearby point.
      bool done = false;
      for (std::size_t c : nbrs_[q]) {
        if (!selected(c)) continue;
        const std::size_t i = pos_[c];
        double delta = d(seq_[i - 1], q) - d(seq_[i - 1], c);
        if (!is_last(i)) delta += d(q, seq_[i + 1]) - d(c, seq_[i + 1]);
        if (delta < -kEps) {
          seq_[i] = q;
          pos_[c] = kNone;
          pos_[q] = i;
          improved = done = true;
          break;
        }
      }
      if (done || mode_ != Mode::fixed_size || interior_count() == 0) continue;
      // Insert q and drop the point with the largest removal gain.
      double worst_gain = -std::numeric_limits<double>::infinity();
      std::size_t worst = kNone;
      for (std::size_t i = 1; i < seq_.size(); ++i) {
        if (seq_[i] >= pts_.size()) continue;
        const double g = removal_gain(i);
        if (g > worst_gain) {
          worst_gain = g;
          worst = seq_[i];
        }
      }
      auto [cost, where] = best_insertion(q, worst);
      if (where != kNone && cost - worst_gain < -kEps) {
        seq_.insert(seq_.begin() + static_cast<long>(where), q);
        seq_.erase(std::find(seq_.begin(), seq_.end(), worst));
        rebuild();
        improved = true;
      }
    }
    return improved;
  }

  const PointSet& pts_;
  Point start_;
  std::optional<Point> end_;
  const SearchOptions& opts_;
  std::vector<std::vector<std::size_t>> nbrs_;
  std::vector<std::size_t> seq_;
  std::vector<std::size_t> pos_;
  Mode mode_ = Mode::penalised;
  double penalty_ = 0.0;
  std::size_t limit_ = kNone;
};

}  // namespace detail

/// Walks the floor(s) unit cubes along the main diagonal of a cube region and
/// takes the lowest-index point of each nonempty one. Cubes are half-open, so
/// a point belongs to at most one of them.
inline RatioPath greedy_diagonal(const PointSet& points, const Region& region) {
  if (!region.is_cube()) throw InvalidArgument("greedy_diagonal: region must be a cube");
  const double side = region.sides().front();
  const auto cubes = static_cast<std::size_t>(std::floor(side));
  std::vector<std::size_t> pick(cubes, detail::kNone);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    const double first = std::floor(p[0] - region.lower()[0]);
    if (first < 0.0 || first >= static_cast<double>(cubes)) continue;
    bool diagonal = true;
    for (std::size_t k = 1; k < points.dim(); ++k) {
      if (std::floor(p[k] - region.lower()[k]) != first) {
        diagonal = false;
        break;
      }
    }
    const auto cube = static_cast<std::size_t>(first);
    if (diagonal && pick[cube] == detail::kNone) pick[cube] = i;
  }
  std::vector<std::size_t> interior;
  for (auto i : pick) {
    if (i != detail::kNone) interior.push_back(i);
  }
  return make_ratio_path(points, region.lower(), region.upper(), std::move(interior));
}

/// Constant A4 in l(greedy) <= A4 * ceil(s): an edge between points in
/// diagonal cubes a < b is at most sqrt(d) (b - a + 1) long, and summing
/// over the visited cubes telescopes to sqrt(d) (ceil(s) + #picked) <= 2 sqrt(d) ceil(s).
inline double greedy_length_constant(std::size_t dim) { return 2.0 * std::sqrt(static_cast<double>(dim)); }

/// Joins diagonal paths across a chain of regions whose corners meet. The
/// shared corner is dropped: the last edge of each part and the first edge of
/// the next become one edge. Interior indices are kept part-local, in order.
inline RatioPath concatenate_paths(std::span<const RatioPath> parts, std::span<const Region> layout) {
  if (parts.empty()) throw InvalidArgument("concatenate_paths: no parts");
  if (parts.size() != layout.size()) throw InvalidArgument("concatenate_paths: one region per part required");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].start != layout[i].lower() || parts[i].end != layout[i].upper()) {
      throw InvalidArgument("concatenate_paths: part " + std::to_string(i) + " does not span its region's diagonal");
    }
    if (i + 1 < parts.size() && layout[i].upper() != layout[i + 1].lower()) {
      throw InvalidArgument("concatenate_paths: regions " + std::to_string(i) + " and " + std::to_string(i + 1) +
                            " are not adjacent");
    }
  }
  std::vector<Point> vertices;
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& v = parts[i].vertices;
    const std::size_t first = i == 0 ? 0 : 1;
    const std::size_t last = i + 1 == parts.size() ? v.size() : v.size() - 1;
    vertices.insert(vertices.end(), v.begin() + static_cast<long>(first), v.begin() + static_cast<long>(last));
    interior.insert(interior.end(), parts[i].interior.begin(), parts[i].interior.end());
  }
  return make_ratio_path(std::move(vertices), std::move(interior));
}

namespace detail {

inline std::optional<RatioPath> warm_start(const PointSet& points, const Region& region,
                                           std::optional<std::size_t> max_interior) {
  if (!region.is_cube()) return std::nullopt;
  auto greedy = greedy_diagonal(points, region);
  if (max_interior && greedy.interior.size() > *max_interior) return std::nullopt;
  greedy.max_interior = max_interior;
  return greedy;
}

}  // namespace detail

/// Parametric (Dinkelbach) search for the minimum average-edge-length path
/// across the region's diagonal. Exact inner minimisation for instances up to
/// opts.exact_cap points, local search above that.
inline DinkelbachResult dinkelbach_search(const PointSet& points, const Region& region,
                                          std::optional<std::size_t> max_interior = std::nullopt,
                                          const SearchOptions& opts = {}) {
  opts.validate();
  if (region.dim() != points.dim()) throw InvalidArgument("dinkelbach: region dimension mismatch");
  const bool exact = opts.allow_exact_inner && points.size() <= opts.exact_cap;

  DinkelbachResult result;
  result.exact_inner = exact;
  RatioPath incumbent = detail::warm_start(points, region, max_interior)
                            .value_or(make_ratio_path(points, region.lower(), region.upper(), {}, max_interior));
  auto record = [&](std::size_t iteration) {
    const double c = incumbent.ratio;
    result.trace.push_back(
        {c, incumbent, incumbent.length - c * static_cast<double>(incumbent.edges) + c, iteration});
  };
  record(0);

  std::optional<DiagonalPathTable> table;
  std::optional<detail::PathImprover> improver;
  if (exact) {
    table.emplace(points, region, max_interior, opts.exact_cap);
  } else {
    improver.emplace(points, region.lower(), region.upper(), opts);
  }
  const std::size_t limit = max_interior.value_or(points.size());

  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    const double c = incumbent.ratio;
    RatioPath candidate;
    if (exact) {
      candidate = table->path(table->argmin_parametric(c), false);
    } else {
      improver->set_path(incumbent.interior);
      improver->optimize_penalised(c, limit);
      candidate = make_ratio_path(points, region.lower(), region.upper(), improver->interior(), max_interior);
    }
    result.terminal_transform = candidate.length - c * static_cast<double>(candidate.edges) + c;
    const double decrease = c - candidate.ratio;
    if (!(decrease > 0.0)) break;
    incumbent = std::move(candidate);
    incumbent.max_interior = max_interior;
    record(it);
    // The exact inner step reaches the optimum in finitely many iterations,
    // so it runs until the ratio stops decreasing.
    if (!exact && decrease < opts.tolerance) break;
  }
  incumbent.optimal = exact;
  result.path = std::move(incumbent);
  return result;
}

inline RatioPath dinkelbach_ratio_path(const PointSet& points, const Region& region,
                                       std::optional<std::size_t> max_interior = std::nullopt,
                                       const SearchOptions& opts = {}) {
  return dinkelbach_search(points, region, max_interior, opts).path;
}

/// Minimum average-edge-length diagonal path in d = 2 whose edges strictly
/// increase the second coordinate. Each Dinkelbach step is solved exactly by
/// a DP over points sorted by height.
inline DinkelbachResult oriented_path_search(const PointSet& points, const Region& region,
                                             const SearchOptions& opts = {}) {
  if (points.dim() != 2 || region.dim() != 2) throw UnsupportedDimension("oriented_path_search: requires d = 2");
  const Point start = region.lower();
  const Point end = region.upper();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double y = points[i][1];
    if (y > start[1] && y < end[1]) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a][1] < points[b][1]; });
  const std::size_t n = order.size();
  std::vector<double> from_start(n), to_end(n);
  for (std::size_t t = 0; t < n; ++t) {
    from_start[t] = distance(start.span(), points[order[t]]);
    to_end[t] = distance(points[order[t]], end.span());
  }

  std::vector<double> value(n);
  std::vector<std::size_t> parent(n);
  // Minimises l - c*m over y-increasing paths; returns interior in path order.
  auto solve = [&](double c) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto p = points[order[t]];
      double best = from_start[t] - c;
      std::size_t arg = detail::kNone;
      for (std::size_t u = 0; u < t; ++u) {
        const auto q = points[order[u]];
        if (!(q[1] < p[1])) break;  // equal heights sit just before t and are not admissible
        const double cand = value[u] + distance(q, p) - c;
        if (cand < best) {
          best = cand;
          arg = u;
        }
      }
      value[t] = best;
      parent[t] = arg;
    }
    double best = distance(start, end) - c;
    std::size_t arg = detail::kNone;
    for (std::size_t t = 0; t < n; ++t) {
      const double cand = value[t] + to_end[t] - c;
      if (cand < best) {
        best = cand;
        arg = t;
      }
    }
    std::vector<std::size_t> interior;
    for (std::size_t t = arg; t != detail::kNone; t = parent[t]) interior.push_back(order[t]);
    std::reverse(interior.begin(), interior.end());
    return std::make_pair(best + c, interior);
  };

  DinkelbachResult result;
  result.exact_inner = true;
  RatioPath incumbent = make_ratio_path(points, start, end, {});
  if (region.is_cube()) {
    auto greedy = greedy_diagonal(points, region);
    bool increasing = true;
    double prev = start[1];
    for (const auto& v : greedy.vertices) {
      if (&v == &greedy.vertices.front()) continue;
      if (!(v[1] > prev)) increasing = false;
      prev = v[1];
    }
    if (increasing) incumbent = std::move(greedy);
  }
  auto record = [&](std::size_t iteration) {
    const double c = incumbent.ratio;
    result.trace.push_back({c, incumbent, incumbent.length - c * static_cast<double>(incumbent.edges) + c, iteration});
  };
  record(0);
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    const double c = incumbent.ratio;
    auto [transform, interior] = solve(c);
    result.terminal_transform = transform;
    auto candidate = make_ratio_path(points, start, end, std::move(interior));
    if (!(candidate.ratio < c)) break;
    incumbent = std::move(candidate);
    record(it);
  }
  incumbent.optimal = true;
  result.path = std::move(incumbent);
  return result;
}

// ---------------------------------------------------------------------------
// Paths from an origin through m points (T_m).

/// Nearest-unvisited walk from the origin, then fixed-size local search.
inline PathSolution heuristic_origin_path(const PointSet& points, std::size_t m, const Point& origin,
                                          const SearchOptions& opts = {}) {
  opts.validate();
  if (m < 1) throw InvalidArgument("heuristic_origin_path: m must be at least 1");
  if (m > points.size()) throw InfeasibleError("heuristic_origin_path: fewer than m points");
  BucketGrid grid(points);
  std::vector<char> used(points.size(), 0);
  std::vector<std::size_t> walk;
  std::span<const double> cur = origin.span();
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t next = detail::kNone;
    for (std::size_t k = 8;; k *= 2) {
      const auto near = grid.nearest_to(cur, std::min(k, points.size()));
      for (auto v : near) {
        if (!used[v]) {
          next = v;
          break;
        }
      }
      if (next != detail::kNone || k >= points.size()) break;
    }
    used[next] = 1;
    walk.push_back(next);
    cur = points[next];
  }
  double greedy_len = 0.0;
  {
    std::span<const double> prev = origin.span();
    for (auto v : walk) {
      greedy_len += distance(prev, points[v]);
      prev = points[v];
    }
  }
  // Only points within the greedy length of the origin can lie on a better path.
  std::vector<std::size_t> keep;
  std::vector<double> coords;
  std::vector<std::size_t> local(points.size(), detail::kNone);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (distance(origin.span(), points[i]) <= greedy_len) {
      local[i] = keep.size();
      keep.push_back(i);
      coords.insert(coords.end(), points[i].begin(), points[i].end());
    }
  }
  PointSet near(points.region(), std::move(coords), points.provenance());
  std::vector<std::size_t> local_walk;
  for (auto v : walk) local_walk.push_back(local[v]);
  detail::PathImprover improver(near, origin, std::nullopt, opts);
  improver.set_path(local_walk);
  improver.optimize_fixed();
  PathSolution sol;
  sol.origin = origin;
  for (auto v : improver.interior()) sol.order.push_back(keep[v]);
  sol.m = m;
  std::span<const double> prev = origin.span();
  for (auto v : sol.order) {
    sol.length += distance(prev, points[v]);
    prev = points[v];
  }
  sol.optimal = false;
  return sol;
}

/// Exact T_m by depth-first branch and bound, seeded with the heuristic
/// upper bound. Returns nullopt if the node budget is exhausted.
inline std::optional<PathSolution> branch_and_bound_origin_path(const PointSet& points, std::size_t m,
                                                                const Point& origin,
                                                                std::size_t node_budget = 5'000'000,
                                                                const SearchOptions& opts = {}) {
  if (m < 1) throw InvalidArgument("branch_and_bound_origin_path: m must be at least 1");
  if (m > points.size()) throw InfeasibleError("branch_and_bound_origin_path: fewer than m points");
  const PathSolution seed = heuristic_origin_path(points, m, origin, opts);
  double best = seed.length;
  std::vector<std::size_t> best_order = seed.order;

  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (distance(origin.span(), points[i]) <= best) cand.push_back(i);
  }
  std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
    return distance(origin.span(), points[a]) < distance(origin.span(), points[b]);
  });
  std::vector<char> used(points.size(), 0);
  std::vector<std::size_t> stack;
  std::size_t nodes = 0;
  bool exhausted = false;

  std::function<void(std::span<const double>, double)> dfs = [&](std::span<const double> at, double partial) {
    if (exhausted) return;
    if (++nodes > node_budget) {
      exhausted = true;
      return;
    }
    if (stack.size() == m) {
      if (partial < best) {
        best = partial;
        best_order = stack;
      }
      return;
    }
    for (std::size_t v : cand) {
      if (used[v]) continue;
      const double next = partial + distance(at, points[v]);
      if (!(next < best)) continue;
      used[v] = 1;
      stack.push_back(v);
      dfs(points[v], next);
      stack.pop_back();
      used[v] = 0;
    }
  };
  dfs(origin.span(), 0.0);
  if (exhausted) return std::nullopt;
  // The heuristic seed is kept only if nothing strictly shorter exists; its
  // length was accumulated in path order like every DFS candidate.
  return PathSolution{origin, best_order, best, m, true};
}

}  // namespace minratio
