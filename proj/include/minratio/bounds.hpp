#pragma once

// Closed-form lower bound on c(0+) from the branching-random-walk
// comparison, and finite-size upper bounds on delta * c(delta) from
// exact solves on finite cubes.

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "minratio/errors.hpp"
#include "minratio/stats.hpp"

namespace minratio {

enum class BoundTarget { c_zero_plus, delta_c_delta };
enum class BoundDirection { lower, upper };
enum class Derivation { closed_form, finite_s_mean };

inline std::string to_string(BoundTarget t) { return t == BoundTarget::c_zero_plus ? "c(0+)" : "delta*c(delta)"; }
inline std::string to_string(BoundDirection d) { return d == BoundDirection::lower ? "lower" : "upper"; }
inline std::string to_string(Derivation d) { return d == Derivation::closed_form ? "closed_form" : "finite_s_mean"; }

struct BoundResult {
  BoundTarget target = BoundTarget::c_zero_plus;
  BoundDirection direction = BoundDirection::lower;
  int dim = 2;
  double value = 0.0;
  std::map<std::string, double> auxiliary;
  Derivation derivation = Derivation::closed_form;
  std::vector<std::string> caveats;
};

/// Volume of the unit ball, pi^{d/2} / Gamma(1 + d/2). Gamma comes from the
/// C library (tgamma), which is accurate to a few ulp on this range.
inline double unit_ball_volume(int d) {
  if (d < 1) throw InvalidArgument("unit_ball_volume: d must be at least 1");
  const double half = 0.5 * d;
  return std::pow(std::numbers::pi, half) / std::tgamma(1.0 + half);
}

/// c(0+) >= e^{-1} (d-1) (v_d Gamma(d+1))^{-1/(d-1)}, attained by the
/// exponential tilt at lambda* = (d-1)/c.
inline BoundResult brw_lower_bound(int d) {
  if (d < 2) throw InvalidArgument("brw_lower_bound: d must be at least 2");
  const double vd = unit_ball_volume(d);
  const double mass = vd * std::tgamma(d + 1.0);
  const double value = std::exp(-1.0) * (d - 1) * std::pow(mass, -1.0 / (d - 1));
  BoundResult r;
  r.target = BoundTarget::c_zero_plus;
  r.direction = BoundDirection::lower;
  r.dim = d;
  r.value = value;
  r.auxiliary["lambda_star"] = (d - 1) / value;
  r.auxiliary["v_d"] = vd;
  r.derivation = Derivation::closed_form;
  return r;
}

/// Replicate values of L(s, delta) at one cube side.
struct FiniteSizeSample {
  double s = 0.0;
  double delta = 1.0;
  std::vector<double> lengths;
  bool heuristic = false;
};

/// inf over s of s^{-d} E L(s, delta) bounds delta * c(delta) from above; the
/// smallest group mean is reported with a one-sided normal upper confidence
/// limit at `level`.
inline BoundResult finite_s_upper_bound(const std::vector<FiniteSizeSample>& samples, int d, double level = 0.99) {
  if (samples.empty()) throw InvalidArgument("finite_s_upper_bound: no samples");
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("finite_s_upper_bound: level must be in (0, 1)");
  double best = std::numeric_limits<double>::infinity();
  const FiniteSizeSample* arg = nullptr;
  Moments arg_moments;
  for (const auto& g : samples) {
    if (g.lengths.size() < 2) throw InvalidArgument("finite_s_upper_bound: each s needs at least two replicates");
    if (!(g.s > 0.0)) throw InvalidArgument("finite_s_upper_bound: s must be positive");
    const auto mom = moments_of(g.lengths);
    const double normalized = mom.mean() / std::pow(g.s, d);
    if (normalized < best) {
      best = normalized;
      arg = &g;
      arg_moments = mom;
    }
  }
  const double z = normal_upper_quantile(1.0 - level);
  BoundResult r;
  r.target = BoundTarget::delta_c_delta;
  r.direction = BoundDirection::upper;
  r.dim = d;
  r.value = best;
  r.derivation = Derivation::finite_s_mean;
  r.auxiliary["s"] = arg->s;
  r.auxiliary["delta"] = arg->delta;
  r.auxiliary["stderr"] = arg_moments.stderr_of_mean() / std::pow(arg->s, d);
  r.auxiliary["ci_half_width"] = z * r.auxiliary["stderr"];
  r.auxiliary["level"] = level;
  r.auxiliary["heuristic"] = arg->heuristic ? 1.0 : 0.0;
  r.caveats.push_back("bound holds in expectation; value is a sample mean with a normal-approximation interval");
  if (arg->heuristic) r.caveats.push_back("heuristic lengths overstate L, the bound stays valid but is looser");
  return r;
}

}  // namespace minratio
