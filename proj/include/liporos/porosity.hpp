#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"
#include "liporos/separation.hpp"
#include "liporos/space.hpp"

namespace liporos {

/// covering_radius raises this when the ball sees no cloud points: density
/// is undefined there, and a silent infinity would poison profiles.
struct domain_error : input_error {
  using input_error::input_error;
};

namespace detail {

/// Calls fn(offset) for every point of the pitch-h lattice covering the box
/// of the given halfwidths, offset (0,...,0) included.
template <class Fn>
void for_grid_offsets(const Point& halfwidth, double pitch, Fn&& fn) {
  std::size_t dims = halfwidth.size();
  std::vector<long> steps(dims), idx(dims);
  for (std::size_t k = 0; k < dims; ++k) {
    // The epsilon keeps boundary offsets like 0.4/0.05 from rounding away.
    steps[k] = static_cast<long>(std::floor(halfwidth[k] / pitch * (1.0 + 1e-12) + 1e-12));
    idx[k] = -steps[k];
  }
  Point off(dims);
  for (;;) {
    for (std::size_t k = 0; k < dims; ++k) off[k] = double(idx[k]) * pitch;
    fn(off);
    std::size_t k = 0;
    for (; k < dims; ++k) {
      if (++idx[k] <= steps[k]) break;
      idx[k] = -steps[k];
    }
    if (k == dims) return;
  }
}

/// Grid points of pitch h inside the closed ball, in odometer order. The
/// membership filter carries rounding slack so boundary offsets survive the
/// translate-then-measure round trip.
inline std::vector<Point> ball_grid(const Space& space, const Ball& b, double h) {
  double center_scale = 0.0;
  for (double v : b.center) center_scale = std::max(center_scale, std::fabs(v));
  double slack = 64.0 * std::numeric_limits<double>::epsilon() * (b.radius + center_scale);
  std::vector<Point> out;
  for_grid_offsets(space.bounding_halfwidth(b.radius), h, [&](const Point& off) {
    Point cand = space.translate(b.center, off);
    if (space.distance(cand, b.center) <= b.radius + slack) out.push_back(std::move(cand));
  });
  return out;
}

}  // namespace detail

/// Worst-case distance from a point of a grid cell to its center: the
/// covering error of a pitch-h discretization, per space kind.
inline double grid_cover_error(const Space& space, double h) {
  if (space.kind() == SpaceKind::heisenberg)
    return h / std::numbers::sqrt2 + 2.0 * std::sqrt(std::numbers::pi * h / 2.0);
  LpExponent p = space.lp();
  double n = double(space.dim());
  if (p.is_inf()) return h / 2.0;
  return (h / 2.0) * std::pow(n, 1.0 / p.p);
}

// ---------------------------------------------------------------------------
// Largest empty ball inside a probe ball: maximize
//   g(x) = min( d(x, cloud), probe.radius - d(x, probe.center) )
// over a grid of pitch h, then refine by coordinate descent. The returned
// radius is always a valid lower bound; in euclidean kinds it is within an
// additive h of the true maximum.
// ---------------------------------------------------------------------------

struct Hole {
  Point center;
  double radius = 0.0;
};

inline Hole largest_hole(const PointCloud& cloud, const Ball& probe, double h) {
  if (!(h > 0.0) || h > probe.radius / 4.0)
    throw input_error("largest_hole: resolution h must satisfy 0 < h <= radius/4");
  const Space& space = cloud.space();
  space.check_point(probe.center);

  // Points beyond 3r of the probe center cannot beat the containment term.
  std::vector<const Point*> nearby;
  for (const auto& p : cloud.points())
    if (space.distance(p, probe.center) <= 3.0 * probe.radius) nearby.push_back(&p);

  auto objective = [&](const Point& x) {
    double dc = space.distance(x, probe.center);
    if (dc > probe.radius) return -1.0;
    double best = probe.radius - dc;
    for (const Point* p : nearby) best = std::min(best, space.distance(x, *p));
    return best;
  };

  std::vector<Point> grid = detail::ball_grid(space, probe, h);
  std::vector<double> vals(grid.size());
  parallel_for_index(grid.size(), [&](std::size_t i) { vals[i] = objective(grid[i]); });
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (vals[i] > vals[best_i]) best_i = i;

  Point x = grid.empty() ? probe.center : grid[best_i];
  double val = grid.empty() ? objective(x) : vals[best_i];

  double step = h / 2.0;
  for (int sweep = 0; sweep < 400 && step > h * 1e-7; ++sweep) {
    bool improved = false;
    for (std::size_t k = 0; k < x.size(); ++k)
      for (double sgn : {1.0, -1.0}) {
        Point cand = x;
        cand[k] += sgn * step;
        double v = objective(cand);
        if (v > val) {
          val = v;
          x = std::move(cand);
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
  }
  return Hole{std::move(x), std::max(val, 0.0)};
}

// ---------------------------------------------------------------------------
// Covering radius of cloud ∩ ball inside ball: the sup over the ball of the
// distance to the trapped points, sampled on a pitch-h grid. Underestimates
// the true supremum by at most grid_cover_error(space, h).
// ---------------------------------------------------------------------------

inline double covering_radius(const PointCloud& cloud, const Ball& ball, double h) {
  if (!(h > 0.0)) throw input_error("covering_radius: h must be positive");
  const Space& space = cloud.space();
  std::vector<std::size_t> inside = cloud.indices_in_ball(ball);
  if (inside.empty()) throw domain_error("covering_radius: ball sees no points");
  std::vector<Point> grid = detail::ball_grid(space, ball, h);
  std::vector<double> vals(grid.size());
  parallel_for_index(grid.size(), [&](std::size_t g) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : inside) best = std::min(best, space.distance(grid[g], cloud.point(i)));
    vals[g] = best;
  });
  double worst = 0.0;
  for (double v : vals) worst = std::max(worst, v);
  return worst;
}

// ---------------------------------------------------------------------------
// Density profiles along a ball sequence (Def. of asymptotic density).
// ---------------------------------------------------------------------------

struct DensityProfile {
  std::vector<double> covering_radii;  // c_n
  std::vector<double> epsilons;        // ε_n = c_n / r_n
  double grid_error = 0.0;             // additive underestimate bound on c_n
  bool tail_below(double threshold, std::size_t tail) const {
    if (epsilons.size() < tail) return false;
    for (std::size_t i = epsilons.size() - tail; i < epsilons.size(); ++i)
      if (epsilons[i] > threshold) return false;
    return true;
  }
};

inline DensityProfile density_profile(const PointCloud& cloud, const BallSequence& balls, double h) {
  DensityProfile out;
  out.grid_error = grid_cover_error(cloud.space(), h);
  for (std::size_t n = 0; n < balls.size(); ++n) {
    double c;
    try {
      c = covering_radius(cloud, balls.balls[n], h);
    } catch (const domain_error& e) {
      throw domain_error(std::string(e.what()) + " (ball index " + std::to_string(n) + ")");
    }
    out.covering_radii.push_back(c);
    out.epsilons.push_back(c / balls.balls[n].radius);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Porosity profile: probe balls centered at cloud points across scales; the
// per-scale summary λ̂(r) is the smallest hole fraction any probe exhibits.
// Probes are cloud-centered, so λ̂ is a lower-bound protocol for the porosity
// constant (noted in the report header).
// ---------------------------------------------------------------------------

struct HoleRecord {
  Ball probe;
  Point hole_center;
  double hole_radius = 0.0;
  double ratio = 0.0;
};

struct ScaleRecord {
  double scale = 0.0;
  double resolution = 0.0;
  std::vector<HoleRecord> probes;
  double lambda_hat = 0.0;
};

struct PorosityReport {
  std::string protocol =
      "probes centered at cloud points; lambda_hat is a lower-bound estimate";
  double h_over_r = 0.0;
  std::vector<ScaleRecord> scales;
  bool decreasing_trend = false;  // λ̂ shrinking with scale: non-porosity candidate
  /// Annotation only: the caller reads the profile in the small-scales-only
  /// (Zajíček) sense rather than across all radii.
  bool zajicek_small_scales = false;
  BallSequence witnesses;  // smallest-ratio probes, densities attached
};

inline PorosityReport porosity_profile(const PointCloud& cloud, std::vector<double> scales,
                                       std::size_t probes_per_scale, std::uint64_t seed,
                                       double h_over_r = 1.0 / 64.0,
                                       std::size_t witness_count = 6) {
  if (cloud.size() == 0) throw input_error("porosity_profile: empty cloud");
  if (scales.empty()) throw input_error("porosity_profile: no scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw input_error("porosity_profile: scales must be positive");
    if (i > 0 && scales[i] < scales[i - 1])
      throw input_error("porosity_profile: scales must be sorted ascending");
  }
  Rng rng(seed);
  PorosityReport report;
  report.h_over_r = h_over_r;
  for (double r : scales) {
    ScaleRecord rec;
    rec.scale = r;
    rec.resolution = r * h_over_r;
    std::vector<std::size_t> centers = sample_indices(rng, cloud.size(), probes_per_scale);
    rec.probes.resize(centers.size());
    // The grid scan inside largest_hole is the parallel level; probes run in
    // sequence so worker counts never nest.
    for (std::size_t k = 0; k < centers.size(); ++k) {
      Ball probe{cloud.point(centers[k]), r};
      Hole hole = largest_hole(cloud, probe, rec.resolution);
      rec.probes[k] = HoleRecord{probe, hole.center, hole.radius, hole.radius / r};
    }
    rec.lambda_hat = std::numeric_limits<double>::infinity();
    for (const auto& p : rec.probes) rec.lambda_hat = std::min(rec.lambda_hat, p.ratio);
    report.scales.push_back(std::move(rec));
  }
  if (report.scales.size() >= 2)
    report.decreasing_trend =
        report.scales.back().lambda_hat < 0.5 * report.scales.front().lambda_hat;

  // Witness candidates: probes with the smallest hole fractions, re-measured
  // for density so the extractor receives ε_n data.
  std::vector<std::pair<double, const HoleRecord*>> ranked;
  for (const auto& sc : report.scales)
    for (const auto& p : sc.probes) ranked.push_back({p.ratio, &p});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < ranked.size() && i < witness_count; ++i) {
    const Ball& b = ranked[i].second->probe;
    report.witnesses.balls.push_back(b);
    double c = covering_radius(cloud, b, b.radius * h_over_r);
    report.witnesses.densities.push_back(c / b.radius);
    report.witnesses.density_bound_valid.push_back(1);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Density transfer (the geodesic-space lemma): if cloud ∩ A is δ-dense in A,
// then cloud ∩ B is 2δ-dense in every ball B ⊂ A of radius >= δ. On a
// geodesic space a transfer failure is impossible; observing one means the
// distance oracle is broken.
// ---------------------------------------------------------------------------

struct DensityTransferReport {
  bool hypothesis_met = false;
  std::string hypothesis_failure;  // set when not met
  bool transfer_ok = false;
  double delta = 0.0;
  double measured_region = 0.0;  // covering radius of cloud in A
  double measured_inner = 0.0;   // covering radius of cloud in B
  double bound = 0.0;            // 2δ + grid error
  std::optional<Point> violating_point;
};

inline DensityTransferReport verify_density_transfer(const PointCloud& cloud, const Ball& region,
                                                     double delta, const Ball& inner, double h) {
  DensityTransferReport rep;
  rep.delta = delta;
  const Space& space = cloud.space();
  double gerr = grid_cover_error(space, h);
  double centers = space.distance(region.center, inner.center);
  if (centers + inner.radius > region.radius + 1e-12) {
    rep.hypothesis_failure = "inner ball not contained in region";
    return rep;
  }
  if (inner.radius < delta) {
    rep.hypothesis_failure = "inner radius below delta";
    return rep;
  }
  double cov_region;
  try {
    cov_region = covering_radius(cloud, region, h);
  } catch (const domain_error&) {
    rep.hypothesis_failure = "region sees no points";
    return rep;
  }
  rep.measured_region = cov_region;
  if (cov_region > delta) {
    rep.hypothesis_failure = "cloud is not delta-dense in region";
    return rep;
  }
  rep.hypothesis_met = true;
  rep.bound = 2.0 * delta + gerr;
  try {
    rep.measured_inner = covering_radius(cloud, inner, h);
  } catch (const domain_error&) {
    // No trapped point at all: report the inner center as the violation.
    rep.transfer_ok = false;
    rep.violating_point = inner.center;
    return rep;
  }
  rep.transfer_ok = rep.measured_inner <= rep.bound;
  if (!rep.transfer_ok) {
    // Recover the witnessing grid point for the report.
    std::vector<std::size_t> inside = cloud.indices_in_ball(inner);
    double worst = -1.0;
    for (const Point& g : detail::ball_grid(space, inner, h)) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i : inside) best = std::min(best, space.distance(g, cloud.point(i)));
      if (best > worst) {
        worst = best;
        rep.violating_point = g;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Lebesgue density scan over a boolean grid (the measure argument behind
// "porous sets contain no point of density").
// ---------------------------------------------------------------------------

struct BoolGrid {
  Point origin;                   // corner of the box
  double pitch = 0.0;             // cell side
  std::vector<std::size_t> dims;  // cells per axis
  std::vector<char> cells;        // row-major, dims[0] fastest

  std::size_t cell_count() const {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    return n;
  }
  Point cell_center(std::size_t flat) const {
    Point c(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) {
      c[k] = origin[k] + (double(flat % dims[k]) + 0.5) * pitch;
      flat /= dims[k];
    }
    return c;
  }
  bool contains(const Point& x) const {
    for (std::size_t k = 0; k < dims.size(); ++k)
      if (x[k] < origin[k] || x[k] > origin[k] + double(dims[k]) * pitch) return false;
    return true;
  }
};

/// Fraction of grid cells of B(point, r) that belong to the set, for each
/// radius (euclidean l2 balls over the grid coordinates). A sequence tending
/// to 1 exhibits a density-point candidate and certifies non-porosity.
inline std::vector<double> lebesgue_density_scan(const BoolGrid& grid, const Point& point,
                                                 const std::vector<double>& radii) {
  if (point.size() != grid.dims.size())
    throw input_error("lebesgue_density_scan: point dimension mismatch");
  if (!grid.contains(point)) throw input_error("lebesgue_density_scan: point outside grid box");
  double rmin = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    if (!(r > 0.0)) throw input_error("lebesgue_density_scan: radii must be positive");
    rmin = std::min(rmin, r);
  }
  if (grid.pitch > rmin / 8.0)
    throw input_error("lebesgue_density_scan: grid pitch must be <= min radius / 8");
  std::vector<double> out;
  for (double r : radii) {
    std::size_t in_ball = 0, marked = 0;
    for (std::size_t f = 0; f < grid.cell_count(); ++f) {
      Point c = grid.cell_center(f);
      double s = 0.0;
      for (std::size_t k = 0; k < c.size(); ++k) s += (c[k] - point[k]) * (c[k] - point[k]);
      if (s <= r * r) {
        ++in_ball;
        if (grid.cells[f]) ++marked;
      }
    }
    out.push_back(in_ball ? double(marked) / double(in_ball) : 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Doubling constant estimate: a greedy max-coverage r/2-net of a grid
// discretization of the ball. Greedy covering (pick the candidate covering
// the most uncovered grid points) recovers the exact subdivision count on
// boxes and stays within a small factor elsewhere.
// ---------------------------------------------------------------------------

inline std::size_t doubling_estimate(const Space& space, const Ball& ball, double h) {
  if (!(h > 0.0) || h > ball.radius / 8.0)
    throw input_error("doubling_estimate: h must satisfy 0 < h <= radius/8");
  std::vector<Point> grid = detail::ball_grid(space, ball, h);
  std::size_t n = grid.size();
  if (n == 0) return 0;
  double half = ball.radius / 2.0;
  std::vector<char> covered(n, 0);
  std::vector<std::vector<std::uint32_t>> covers(n);
  parallel_for_index(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j)
      if (space.distance(grid[i], grid[j]) <= half) covers[i].push_back(std::uint32_t(j));
  });
  std::size_t remaining = n, picked = 0;
  while (remaining > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t gain = 0;
      for (std::uint32_t j : covers[i])
        if (!covered[j]) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best_gain == 0) break;  // unreachable: every point covers itself
    for (std::uint32_t j : covers[best])
      if (!covered[j]) {
        covered[j] = 1;
        --remaining;
      }
    ++picked;
  }
  return picked;
}

}  // namespace liporos
