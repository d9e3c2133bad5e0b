#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"
#include "liporos/space.hpp"

namespace liporos {

// ---------------------------------------------------------------------------
// Well-separated collections: d(x,y) >= λ·(d(x,x0) + d(y,x0)) across members
// of different sets. A certificate is the largest λ that can be certified,
// together with the pair attaining it.
// ---------------------------------------------------------------------------

struct BallSequence {
  std::vector<Ball> balls;
  /// Density constants ε_n aligned with balls, when known.
  std::vector<double> densities;
  /// Per-ball flag: the ε_n bookkeeping bound is valid (Lemma-style shrink
  /// factors only apply once ε_n drops below the shrink factor).
  std::vector<char> density_bound_valid;

  std::size_t size() const { return balls.size(); }
  bool has_densities() const { return densities.size() == balls.size(); }
};

struct SeparationCertificate {
  double lambda = std::numeric_limits<double>::infinity();  // infinity: vacuous (<2 sets)
  std::size_t witness_i = 0, witness_j = 0;                 // set indices of the minimizing pair
  double witness_numerator = 0.0;                           // d(x,y) or the ball gap
  double witness_denominator = 0.0;                         // d(x,x0) + d(y,x0) (+ radii for balls)
  /// Set when λ = 0 because two sets share a point other than x0.
  std::optional<std::pair<std::size_t, std::size_t>> shared_point_sets;

  bool vacuous() const { return std::isinf(lambda); }
};

/// Exhaustive certificate for finite point groups inside one metric.
/// `groups` are disjoint-by-intent index sets; the shared base x0 may appear
/// in several groups without spoiling separation.
template <PointMetric M>
SeparationCertificate well_separation(const M& m, const std::vector<std::vector<std::size_t>>& groups,
                                      std::size_t x0) {
  SeparationCertificate cert;
  if (groups.size() < 2) return cert;
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    for (std::size_t gj = gi + 1; gj < groups.size(); ++gj)
      for (std::size_t a : groups[gi])
        for (std::size_t b : groups[gj]) {
          if (a == b) {
            if (a == x0) continue;
            cert.lambda = 0.0;
            cert.witness_i = gi;
            cert.witness_j = gj;
            cert.shared_point_sets = {gi, gj};
            return cert;
          }
          double num = m.distance(a, b);
          double den = m.distance(a, x0) + m.distance(b, x0);
          if (den == 0.0) continue;  // both points are x0
          double ratio = num / den;
          if (ratio < cert.lambda) {
            cert.lambda = ratio;
            cert.witness_i = gi;
            cert.witness_j = gj;
            cert.witness_numerator = num;
            cert.witness_denominator = den;
          }
        }
  return cert;
}

/// Closed-form certificate for a family of balls: for points x in B_i and y
/// in B_j,
///   d(x,y) >= d(p_i,p_j) - r_i - r_j
///   d(x,x0) + d(y,x0) <= d(p_i,x0) + r_i + d(p_j,x0) + r_j,
/// so the ratio of those two bounds certifies λ for the pair. Exact, cheap
/// and resolution-free; sampling is only used to cross-check in tests.
inline SeparationCertificate well_separation_balls(const Space& space,
                                                   const std::vector<Ball>& balls,
                                                   const Point& x0) {
  SeparationCertificate cert;
  if (balls.size() < 2) return cert;
  std::vector<double> to_x0(balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) to_x0[i] = space.distance(balls[i].center, x0);
  for (std::size_t i = 0; i < balls.size(); ++i)
    for (std::size_t j = i + 1; j < balls.size(); ++j) {
      double gap = space.distance(balls[i].center, balls[j].center) - balls[i].radius - balls[j].radius;
      double den = to_x0[i] + balls[i].radius + to_x0[j] + balls[j].radius;
      if (gap <= 0.0) {
        cert.lambda = 0.0;
        cert.witness_i = i;
        cert.witness_j = j;
        cert.witness_numerator = gap;
        cert.witness_denominator = den;
        cert.shared_point_sets = {i, j};
        return cert;
      }
      double ratio = gap / den;
      if (ratio < cert.lambda) {
        cert.lambda = ratio;
        cert.witness_i = i;
        cert.witness_j = j;
        cert.witness_numerator = gap;
        cert.witness_denominator = den;
      }
    }
  return cert;
}

/// Uniform sample from a closed l_p / CC ball, via rejection from the
/// bounding box (deterministic under the rng).
inline Point sample_in_ball(const Space& space, const Ball& b, Rng& rng) {
  Point hw = space.bounding_halfwidth(b.radius);
  for (int tries = 0; tries < 10000; ++tries) {
    Point off(hw.size());
    for (std::size_t k = 0; k < hw.size(); ++k) off[k] = rng.uniform(-hw[k], hw[k]);
    Point cand = space.translate(b.center, off);
    if (space.distance(cand, b.center) <= b.radius) return cand;
  }
  return b.center;  // unreachable for the shapes involved
}

/// Smallest sampled eq-ratio d(x,y)/(d(x,x0)+d(y,x0)) over cross pairs of
/// points drawn from pairs of balls. A sound certificate never exceeds it.
inline double sampled_separation_ratio(const Space& space, const std::vector<Ball>& balls,
                                       const Point& x0, std::size_t pair_samples, Rng& rng) {
  double worst = std::numeric_limits<double>::infinity();
  if (balls.size() < 2) return worst;
  for (std::size_t s = 0; s < pair_samples; ++s) {
    std::size_t i = rng.index(balls.size());
    std::size_t j = rng.index(balls.size() - 1);
    if (j >= i) ++j;
    Point x = sample_in_ball(space, balls[i], rng);
    Point y = sample_in_ball(space, balls[j], rng);
    double den = space.distance(x, x0) + space.distance(y, x0);
    if (den == 0.0) continue;
    worst = std::min(worst, space.distance(x, y) / den);
  }
  return worst;
}

/// Strict pairwise disjointness: d(p_i,p_j) > r_i + r_j for every pair.
inline bool pairwise_disjoint(const Space& space, const std::vector<Ball>& balls) {
  for (std::size_t i = 0; i < balls.size(); ++i)
    for (std::size_t j = i + 1; j < balls.size(); ++j)
      if (space.distance(balls[i].center, balls[j].center) <= balls[i].radius + balls[j].radius)
        return false;
  return true;
}

}  // namespace liporos
