#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"
#include "liporos/lipschitz.hpp"
#include "liporos/porosity.hpp"
#include "liporos/quotient.hpp"
#include "liporos/separation.hpp"
#include "liporos/space.hpp"

namespace liporos {

// ---------------------------------------------------------------------------
// Lattices {(a_m, a_n)} with the first row and column marked as A.
// ---------------------------------------------------------------------------

struct LatticeSpec {
  struct Powers {
    double base = 2.0;
  };
  struct Polynomial {
    std::vector<double> coeffs;  // ascending powers of n
  };
  struct Linear {
    double step = 1.0;
  };
  std::variant<Powers, Polynomial, Linear> rule = Powers{};
  std::size_t truncation = 12;
  LpExponent metric = LpExponent::l1();

  double term(std::size_t n) const {
    if (const auto* p = std::get_if<Powers>(&rule)) return std::pow(p->base, double(n));
    if (const auto* p = std::get_if<Polynomial>(&rule)) {
      double v = 0.0, x = 1.0;
      for (double c : p->coeffs) {
        v += c * x;
        x *= double(n);
      }
      return v;
    }
    return std::get<Linear>(rule).step * double(n);
  }
};

struct Lattice {
  PointCloud cloud;
  std::vector<std::size_t> boundary;  // indices of A
};

inline Lattice build_lattice(const LatticeSpec& spec) {
  std::size_t N = spec.truncation;
  if (N < 2) throw input_error("build_lattice: truncation must be >= 2");
  std::vector<double> a(N + 1);
  for (std::size_t n = 1; n <= N; ++n) {
    a[n] = spec.term(n);
    if (!(a[n] >= 0.0) || (n > 1 && !(a[n] > a[n - 1])))
      throw input_error("build_lattice: sequence must be strictly increasing and nonnegative");
  }
  std::vector<Point> pts;
  std::vector<std::size_t> boundary;
  for (std::size_t m = 1; m <= N; ++m)
    for (std::size_t n = 1; n <= N; ++n) {
      if (m == 1 || n == 1) boundary.push_back(pts.size());
      pts.push_back(Point{a[m], a[n]});
    }
  // Base point (a_1, a_1) is the first point emitted.
  return Lattice{PointCloud(Space::euclidean(2, spec.metric), std::move(pts), 0),
                 std::move(boundary)};
}

// ---------------------------------------------------------------------------
// The three constants of the power-lattice example, checked exhaustively in
// the l1 metric: d(x,A)+d(y,A) <= 4 d(x,y), nearest-point retraction is
// 5-Lipschitz, and the quotient singletons are (1/5)-separated from the
// A-class. Exponential growth is what makes the first bound work; the report
// carries the worst pair for each bound so a deliberate failure (linear
// growth) names its violator.
// ---------------------------------------------------------------------------

struct LatticeConstantsReport {
  std::size_t truncation = 0;
  double max_sum_over_distance = 0.0;  // worst (d(x,A)+d(y,A))/d(x,y)
  SlopeWitness four_witness;
  bool four_bound_holds = false;
  double retraction_lip = 0.0;
  SlopeWitness retraction_witness;
  bool retraction_bound_holds = false;
  double quotient_lambda = 0.0;
  std::size_t quotient_witness_i = 0, quotient_witness_j = 0;
  bool separation_holds = false;
  bool all_hold() const { return four_bound_holds && retraction_bound_holds && separation_holds; }
};

inline LatticeConstantsReport verify_lattice_constants(LatticeSpec spec) {
  spec.metric = LpExponent::l1();  // the retraction argument lives in l1
  Lattice lat = build_lattice(spec);
  const PointCloud& cloud = lat.cloud;
  std::size_t n = cloud.size();

  std::vector<double> to_a(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a : lat.boundary) best = std::min(best, cloud.distance(i, a));
    to_a[i] = best;
  }
  LatticeConstantsReport rep;
  rep.truncation = spec.truncation;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double q = (to_a[i] + to_a[j]) / cloud.distance(i, j);
      if (q > rep.max_sum_over_distance) {
        rep.max_sum_over_distance = q;
        rep.four_witness = {i, j, q};
      }
    }
  rep.four_bound_holds = rep.max_sum_over_distance <= 4.0;

  Retraction r = nearest_point_retraction(cloud, lat.boundary);
  rep.retraction_lip = r.lip_constant;
  rep.retraction_witness = r.witness;
  rep.retraction_bound_holds = r.lip_constant <= 5.0;

  QuotientSpace q(cloud, lat.boundary);
  std::vector<std::vector<std::size_t>> singletons;
  for (std::size_t i = 1; i < q.size(); ++i) singletons.push_back({i});
  SeparationCertificate cert = well_separation(q, singletons, q.base_index());
  rep.quotient_lambda = cert.lambda;
  rep.quotient_witness_i = cert.witness_i;
  rep.quotient_witness_j = cert.witness_j;
  rep.separation_holds = cert.lambda >= 0.2;
  return rep;
}

// ---------------------------------------------------------------------------
// The square lattice a_n = n² is not porous: the witness ball B((n²,n²), n²)
// in l_inf admits no hole of ratio above 4/n. The check runs the hole search
// on the truncated lattice and reports the measured ratio against the bound.
// ---------------------------------------------------------------------------

struct SquareLatticeRecord {
  std::size_t n = 0;
  Ball witness;
  double hole_ratio = 0.0;
  double bound = 0.0;  // 4/n + 2h/r
  bool holds = false;
};

struct SquareLatticeReport {
  std::vector<SquareLatticeRecord> records;
  double h_over_r = 0.0;
  bool all_hold() const {
    for (const auto& r : records)
      if (!r.holds) return false;
    return !records.empty();
  }
};

inline SquareLatticeReport verify_square_lattice_nonporous(const std::vector<std::size_t>& ns,
                                                           double h_over_r = 1.0 / 64.0,
                                                           std::size_t truncation = 0) {
  if (ns.empty()) throw input_error("verify_square_lattice_nonporous: no n values");
  std::size_t n_max = *std::max_element(ns.begin(), ns.end());
  std::size_t needed = static_cast<std::size_t>(std::ceil(std::numbers::sqrt2 * double(n_max))) + 2;
  if (truncation == 0) truncation = needed;
  if (truncation < needed)
    throw input_error("verify_square_lattice_nonporous: truncation " + std::to_string(truncation) +
                      " too small, need " + std::to_string(needed));
  LatticeSpec spec;
  spec.rule = LatticeSpec::Polynomial{{0.0, 0.0, 1.0}};  // a_n = n²
  spec.truncation = truncation;
  spec.metric = LpExponent::linf();  // the porosity witness lives in l_inf
  Lattice lat = build_lattice(spec);

  SquareLatticeReport rep;
  rep.h_over_r = h_over_r;
  for (std::size_t n : ns) {
    SquareLatticeRecord rec;
    rec.n = n;
    double r = double(n) * double(n);
    rec.witness = Ball{Point{r, r}, r};
    Hole hole = largest_hole(lat.cloud, rec.witness, r * h_over_r);
    rec.hole_ratio = hole.radius / r;
    rec.bound = 4.0 / double(n) + 2.0 * h_over_r;
    rec.holds = rec.hole_ratio <= rec.bound;
    rep.records.push_back(rec);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Dyadic annuli family R_{-3n} sampled uniformly in (log radius, direction):
// the family is (1/16)-separated with respect to the origin for any choice
// of points in the annuli.
// ---------------------------------------------------------------------------

struct AnnuliFamily {
  PointCloud cloud;  // base = origin at index 0, then samples annulus by annulus
  std::vector<std::vector<std::size_t>> groups;
};

inline AnnuliFamily build_annuli_family(const Space& space, std::size_t n_max,
                                        std::size_t samples_per_annulus, std::uint64_t seed) {
  if (!space.is_euclidean())
    throw input_error("build_annuli_family: euclidean ambient space required");
  if (n_max < 1) throw input_error("build_annuli_family: n_max must be >= 1");
  Rng rng(seed);
  std::vector<Point> pts{Point(space.dim(), 0.0)};
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t n = 1; n <= n_max; ++n) {
    double rlo = std::ldexp(1.0, -3 * int(n) - 1), rhi = std::ldexp(1.0, -3 * int(n) + 1);
    std::vector<std::size_t> group;
    for (std::size_t s = 0; s < samples_per_annulus; ++s) {
      double r = rng.log_uniform(rlo, rhi);
      Point dir(space.dim());
      double norm = 0.0;
      while (norm == 0.0) {
        for (double& d : dir) d = rng.normal();
        norm = detail::lp_norm(dir, space.lp());
      }
      for (double& d : dir) d *= r / norm;
      group.push_back(pts.size());
      pts.push_back(std::move(dir));
    }
    groups.push_back(std::move(group));
  }
  return AnnuliFamily{PointCloud(space, std::move(pts), 0), std::move(groups)};
}

// ---------------------------------------------------------------------------
// Synthetic porous / non-porous fixtures.
// ---------------------------------------------------------------------------

/// Net step·Z^2 clipped to [0, side]², base at the origin corner.
inline PointCloud build_net(double step, double side) {
  if (!(step > 0.0) || !(side >= step)) throw input_error("build_net: bad step or side");
  std::vector<Point> pts;
  for (double x = 0.0; x <= side + 1e-12; x += step)
    for (double y = 0.0; y <= side + 1e-12; y += step) pts.push_back(Point{x, y});
  return PointCloud(Space::euclidean(2, LpExponent::linf()), std::move(pts), 0);
}

/// Two-dimensional Cantor dust: the product C × C where C keeps the two end
/// intervals of relative length `ratio` at every level. Points are the
/// centers of the depth-level cells; the middle gap fraction 1-2·ratio is
/// the hole oracle for porosity tests.
inline PointCloud build_cantor_dust(double ratio, std::size_t depth, double side = 1.0) {
  if (!(ratio > 0.0 && ratio < 0.5)) throw input_error("build_cantor_dust: ratio must be in (0,1/2)");
  if (depth < 1 || depth > 8) throw input_error("build_cantor_dust: depth must be in [1,8]");
  std::vector<double> starts{0.0};
  double len = side;
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<double> next;
    next.reserve(starts.size() * 2);
    for (double s : starts) {
      next.push_back(s);
      next.push_back(s + (1.0 - ratio) * len);
    }
    starts = std::move(next);
    len *= ratio;
  }
  std::vector<Point> pts;
  pts.reserve(starts.size() * starts.size());
  for (double x : starts)
    for (double y : starts) pts.push_back(Point{x + len / 2.0, y + len / 2.0});
  return PointCloud(Space::euclidean(2, LpExponent::linf()), std::move(pts), 0);
}

/// Smith–Volterra–Cantor set of positive measure, times the full interval:
/// step k removes the middle q^k (absolute length) from each surviving
/// interval. Rasterized to a boolean grid for the density scan.
struct FatCantorProduct {
  BoolGrid grid;
  std::vector<std::pair<double, double>> intervals;  // surviving x-intervals
  std::vector<double> level_length;                  // interval length per level
  double total_measure = 0.0;                        // limit measure of the x-set
};

inline FatCantorProduct build_fat_cantor_product(double removed_base, std::size_t depth,
                                                 std::size_t cells_per_axis = 1024) {
  if (!(removed_base > 0.0 && removed_base < 1.0 / 3.0))
    throw input_error("build_fat_cantor_product: removed fraction base must be in (0,1/3)");
  if (depth < 1 || depth > 12) throw input_error("build_fat_cantor_product: depth out of range");
  FatCantorProduct out;
  std::vector<std::pair<double, double>> iv{{0.0, 1.0}};
  out.level_length.push_back(1.0);
  double q = removed_base, qk = 1.0;
  for (std::size_t k = 1; k <= depth; ++k) {
    qk *= q;
    std::vector<std::pair<double, double>> next;
    next.reserve(iv.size() * 2);
    for (auto [a, b] : iv) {
      double len = b - a;
      double keep = (len - qk) / 2.0;
      if (!(keep > 0.0))
        throw input_error("build_fat_cantor_product: removed pieces exhaust an interval");
      next.push_back({a, a + keep});
      next.push_back({b - keep, b});
    }
    iv = std::move(next);
    out.level_length.push_back(iv.front().second - iv.front().first);
  }
  out.intervals = iv;
  // Σ_k 2^{k-1} q^k = q/(1-2q) is the total removed length in the limit.
  out.total_measure = 1.0 - q / (1.0 - 2.0 * q);

  out.grid.origin = {0.0, 0.0};
  out.grid.pitch = 1.0 / double(cells_per_axis);
  out.grid.dims = {cells_per_axis, cells_per_axis};
  out.grid.cells.assign(cells_per_axis * cells_per_axis, 0);
  std::vector<char> col(cells_per_axis, 0);
  for (std::size_t i = 0; i < cells_per_axis; ++i) {
    double x = (double(i) + 0.5) * out.grid.pitch;
    for (auto [a, b] : iv)
      if (x >= a && x <= b) {
        col[i] = 1;
        break;
      }
  }
  for (std::size_t j = 0; j < cells_per_axis; ++j)
    for (std::size_t i = 0; i < cells_per_axis; ++i)
      out.grid.cells[j * cells_per_axis + i] = col[i];
  return out;
}

}  // namespace liporos
