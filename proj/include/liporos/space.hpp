#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "liporos/core.hpp"

namespace liporos {

enum class SpaceKind { euclidean, heisenberg };

/// The p of an l_p norm; infinity() encodes l_inf.
struct LpExponent {
  double p = 2.0;
  static LpExponent l1() { return {1.0}; }
  static LpExponent l2() { return {2.0}; }
  static LpExponent linf() { return {std::numeric_limits<double>::infinity()}; }
  bool is_inf() const { return std::isinf(p); }
};

namespace detail {

inline double lp_norm(std::span<const double> v, LpExponent p) {
  if (p.is_inf()) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  }
  if (p.p == 1.0) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
  }
  if (p.p == 2.0) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }
  double s = 0.0;
  for (double x : v) s += std::pow(std::fabs(x), p.p);
  return std::pow(s, 1.0 / p.p);
}

// --- First Heisenberg group -------------------------------------------------
//
// Group law (a,b,c)·(a',b',c') = (a+a', b+b', c+c' + (ab'-ba')/2), dilations
// δ_λ(a,b,c) = (λa, λb, λ²c). Horizontal curves satisfy dc = (a db - b da)/2,
// so heights are swept areas and unit-speed geodesics from the identity
// project to circular arcs. For a target at planar distance ρ and height ζ,
// the half turning angle u ∈ (0,π) solves
//   F(u) = (2u - sin 2u) / (8 sin²u) = |ζ| / ρ²,
// F strictly increasing, and the distance is ρ·u/sin u. Degenerate targets:
// ζ=0 is the straight segment (d=ρ), ρ=0 is a full circle (d = 2√(π|ζ|)).

inline void heis_mul(const Point& x, const Point& y, Point& out) {
  out.resize(3);
  out[0] = x[0] + y[0];
  out[1] = x[1] + y[1];
  out[2] = x[2] + y[2] + 0.5 * (x[0] * y[1] - x[1] * y[0]);
}

inline Point heis_inverse(const Point& x) { return {-x[0], -x[1], -x[2]}; }

/// 2u - sin(2u), by series below u = 0.1 where direct evaluation cancels.
inline double two_u_minus_sin(double u) {
  if (u < 0.1) {
    double t = 2.0 * u, t2 = t * t;
    double term = t * t2 / 6.0, s = term;
    for (int k = 2; k <= 11; ++k) {
      term *= -t2 / ((2.0 * k) * (2.0 * k + 1.0));
      s += term;
    }
    return s;
  }
  return 2.0 * u - std::sin(2.0 * u);
}

inline double cc_profile(double u) {
  double s = std::sin(u);
  return two_u_minus_sin(u) / (8.0 * s * s);
}

constexpr double cc_u_max = std::numbers::pi * (1.0 - 1e-12);

struct CcSolution {
  double dist = 0.0;
  double u = 0.0;        // half turning angle; 0 for straight, pi for full circle
  bool vertical = false; // ρ ≈ 0 branch
};

/// Geodesic data for the target (ρ, ζ) seen from the identity.
inline CcSolution cc_solve(double rho, double zeta, double tol, int iter_cap) {
  CcSolution sol;
  double az = std::fabs(zeta);
  if (az == 0.0) {
    sol.dist = rho;
    return sol;
  }
  if (rho == 0.0 || az / (rho * rho) >= cc_profile(cc_u_max)) {
    // Past u_max the arc formula is numerically meaningless and the vertical
    // circle is within ρ ≤ 3.6e-12·√ζ of the true distance.
    sol.dist = 2.0 * std::sqrt(std::numbers::pi * az);
    sol.u = std::numbers::pi;
    sol.vertical = true;
    return sol;
  }
  double q = az / (rho * rho);
  double lo = 0.0, hi = cc_u_max;
  double scale = std::max(rho, std::sqrt(std::numbers::pi * az));
  auto dist_at = [&](double u) { return u == 0.0 ? rho : rho * u / std::sin(u); };
  int it = 0;
  // Bisect u to machine width: the distance is insensitive to u near the
  // straight regime, but geodesic heights scale linearly with u and feed a
  // square root, so u itself must be fully resolved.
  for (; it < iter_cap; ++it) {
    double mid = 0.5 * (lo + hi);
    if (cc_profile(mid) < q) lo = mid; else hi = mid;
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  double residual = dist_at(hi) - dist_at(lo);
  if (it >= iter_cap && residual > 10.0 * tol * scale)
    throw numeric_error("cc_solve: bisection did not converge", residual);
  sol.u = 0.5 * (lo + hi);
  sol.dist = dist_at(sol.u);
  return sol;
}

/// Point at arc length s along the geodesic from the identity to (w1,w2,ζ).
/// Positions use the chord form 2R·sin(ks/2)·(cos,sin)(α+ks/2), which stays
/// accurate near the cut locus.
inline Point cc_geodesic_from_origin(const Point& w, double s, const CcSolution& sol) {
  double rho = std::hypot(w[0], w[1]);
  double zeta = w[2], az = std::fabs(zeta);
  double sgn = zeta < 0.0 ? -1.0 : 1.0;
  if (az == 0.0) {
    double t = sol.dist > 0.0 ? s / sol.dist : 0.0;
    return {t * w[0], t * w[1], 0.0};
  }
  double gx, gy, gz;
  if (sol.vertical || rho == 0.0) {
    double radius = std::sqrt(az / std::numbers::pi);
    double k = 2.0 * std::numbers::pi / sol.dist;
    double half = 0.5 * k * s;
    double chord = 2.0 * radius * std::sin(half);
    gx = chord * std::cos(half);
    gy = chord * std::sin(half);
    gz = 0.5 * radius * radius * two_u_minus_sin(half);
  } else {
    double radius = rho / (2.0 * std::sin(sol.u));
    double k = 1.0 / radius;
    // Reflect ζ<0 targets through (a,b,c) -> (a,-b,-c), a group isometry.
    double beta = std::atan2(sgn * w[1], w[0]);
    double alpha = beta - sol.u;
    double half = 0.5 * k * s;
    double chord = 2.0 * radius * std::sin(half);
    gx = chord * std::cos(alpha + half);
    gy = chord * std::sin(alpha + half);
    gz = 0.5 * radius * radius * two_u_minus_sin(half);
  }
  if (sgn < 0.0) {
    gy = -gy;
    gz = -gz;
  }
  return {gx, gy, gz};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Space: a pointed geodesic metric space. Immutable; all operations are pure.
// ---------------------------------------------------------------------------

class Space {
 public:
  static Space euclidean(std::size_t dim, LpExponent p) {
    if (dim == 0) throw input_error("Space: dimension must be positive");
    if (!(p.p >= 1.0)) throw input_error("Space: p must be >= 1");
    Space s;
    s.kind_ = SpaceKind::euclidean;
    s.dim_ = dim;
    s.p_ = p;
    s.base_ = Point(dim, 0.0);
    return s;
  }

  static Space heisenberg(double solver_tolerance = 1e-10, int iteration_cap = 200) {
    if (!(solver_tolerance > 0.0)) throw input_error("Space: solver tolerance must be positive");
    Space s;
    s.kind_ = SpaceKind::heisenberg;
    s.dim_ = 3;
    s.tol_ = solver_tolerance;
    s.iter_cap_ = iteration_cap;
    s.base_ = Point(3, 0.0);
    return s;
  }

  SpaceKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  LpExponent lp() const { return p_; }
  double solver_tolerance() const { return tol_; }
  const Point& base_point() const { return base_; }
  bool is_euclidean() const { return kind_ == SpaceKind::euclidean; }

  void check_point(const Point& x) const {
    if (x.size() != dim_) throw input_error("point dimension mismatch");
    require_finite(x, "point");
  }

  double distance(const Point& x, const Point& y) const {
    check_point(x);
    check_point(y);
    if (kind_ == SpaceKind::euclidean) {
      Point d(dim_);
      for (std::size_t i = 0; i < dim_; ++i) d[i] = x[i] - y[i];
      return detail::lp_norm(d, p_);
    }
    Point w(3);
    detail::heis_mul(detail::heis_inverse(x), y, w);
    return detail::cc_solve(std::hypot(w[0], w[1]), w[2], tol_, iter_cap_).dist;
  }

  /// z on the geodesic from x to y with d(x,z) = t·d(x,y). Euclidean kinds
  /// use the linear segment (a geodesic in every l_p norm, and the pinned
  /// choice where l_1/l_inf geodesics are non-unique).
  Point geodesic_point(const Point& x, const Point& y, double t) const {
    if (t < 0.0 || t > 1.0) throw input_error("geodesic_point: t outside [0,1]");
    check_point(x);
    check_point(y);
    if (t == 0.0) return x;
    if (t == 1.0) return y;
    if (kind_ == SpaceKind::euclidean) {
      Point z(dim_);
      for (std::size_t i = 0; i < dim_; ++i) z[i] = x[i] + t * (y[i] - x[i]);
      return z;
    }
    Point w(3);
    detail::heis_mul(detail::heis_inverse(x), y, w);
    auto sol = detail::cc_solve(std::hypot(w[0], w[1]), w[2], tol_, iter_cap_);
    Point g = detail::cc_geodesic_from_origin(w, t * sol.dist, sol);
    Point z;
    detail::heis_mul(x, g, z);
    return z;
  }

  /// Left translation by z: vector addition in R^n, the group law in H^1.
  Point translate(const Point& z, const Point& x) const {
    check_point(z);
    check_point(x);
    if (kind_ == SpaceKind::euclidean) {
      Point out(dim_);
      for (std::size_t i = 0; i < dim_; ++i) out[i] = z[i] + x[i];
      return out;
    }
    Point out;
    detail::heis_mul(z, x, out);
    return out;
  }

  /// δ_λ: scalar multiplication in R^n, (λa, λb, λ²c) in H^1.
  Point dilate(const Point& x, double lambda) const {
    if (!(lambda > 0.0)) throw input_error("dilate: lambda must be positive");
    check_point(x);
    if (kind_ == SpaceKind::euclidean) {
      Point out(dim_);
      for (std::size_t i = 0; i < dim_; ++i) out[i] = lambda * x[i];
      return out;
    }
    return {lambda * x[0], lambda * x[1], lambda * lambda * x[2]};
  }

  /// Half-width per coordinate of a box that contains B(center, r); used by
  /// grid searches. Exact for euclidean kinds, a bounding box for H^1 (the
  /// vertical reach of a CC ball of radius r is r²/4π).
  Point bounding_halfwidth(double r) const {
    if (kind_ == SpaceKind::euclidean) return Point(dim_, r);
    return {r, r, r * r / (4.0 * std::numbers::pi)};
  }

  std::string describe() const {
    if (kind_ == SpaceKind::heisenberg) return "heisenberg";
    std::string p = p_.is_inf() ? "inf" : (p_.p == 1.0 ? "1" : "2");
    return "euclidean(" + std::to_string(dim_) + ", l" + p + ")";
  }

 private:
  Space() = default;
  SpaceKind kind_ = SpaceKind::euclidean;
  std::size_t dim_ = 1;
  LpExponent p_ = LpExponent::l2();
  double tol_ = 1e-10;
  int iter_cap_ = 200;
  Point base_;
};

}  // namespace liporos
