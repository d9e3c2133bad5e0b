#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"

namespace liporos {

/// Values of a real function on a finite pointed metric, vanishing at the
/// base point.
struct LipFunction {
  std::vector<double> values;
};

template <PointMetric M>
LipFunction make_lip_function(const M& m, std::vector<double> values) {
  if (values.size() != m.size()) throw input_error("LipFunction: value count mismatch");
  require_finite(values, "LipFunction");
  if (values[m.base_index()] != 0.0)
    throw input_error("LipFunction: value at base point must be exactly 0");
  return LipFunction{std::move(values)};
}

/// Shift of base point: (Tf)(x) = f(x) - f(0'). Norms are unchanged.
inline std::vector<double> rebase_values(std::span<const double> values, std::size_t new_base) {
  std::vector<double> out(values.begin(), values.end());
  double shift = out.at(new_base);
  for (double& v : out) v -= shift;
  return out;
}

struct SlopeWitness {
  std::size_t i = 0, j = 0;
  double slope = 0.0;
};

/// Best Lipschitz constant over the finite metric, by exhaustive pair scan.
/// Exact at desk scale; the witness pair realizes the supremum.
template <PointMetric M>
SlopeWitness lip_norm_witness(const M& m, std::span<const double> values) {
  std::size_t n = m.size();
  if (n < 2) throw input_error("lip_norm: need at least two points");
  if (values.size() != n) throw input_error("lip_norm: value count mismatch");
  SlopeWitness best;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = std::fabs(values[i] - values[j]) / m.distance(i, j);
      if (s > best.slope) best = {i, j, s};
    }
  return best;
}

template <PointMetric M>
double lip_norm(const M& m, std::span<const double> values) {
  return lip_norm_witness(m, values).slope;
}

template <PointMetric M>
double lip_norm(const M& m, const LipFunction& f) {
  return lip_norm_witness(m, f.values).slope;
}

// ---------------------------------------------------------------------------
// McShane extension by inf-convolution: F(x) = min_y (f(y) + L·d(x,y)).
// Agrees with f on its domain and is L-Lipschitz whenever L >= lip_norm(f).
// ---------------------------------------------------------------------------

template <PointMetric M>
void require_extension_constant(const M& m, std::span<const std::size_t> sub,
                                std::span<const double> f, double L) {
  for (std::size_t a = 0; a < sub.size(); ++a)
    for (std::size_t b = a + 1; b < sub.size(); ++b) {
      double d = m.distance(sub[a], sub[b]);
      double s = std::fabs(f[a] - f[b]);
      if (s > L * d && s - L * d > 1e-12 * std::max(1.0, s))
        throw input_error("mcshane_extend: L=" + std::to_string(L) +
                          " is below the Lipschitz constant " + std::to_string(s / d) +
                          " of the data");
    }
}

/// Extension across the whole finite metric; index i of the result aligns
/// with the parent metric. Points of the subdomain get their exact values.
template <PointMetric M>
std::vector<double> mcshane_extend_all(const M& m, std::span<const std::size_t> sub,
                                       std::span<const double> f, double L) {
  if (sub.empty()) throw input_error("mcshane_extend: empty subdomain");
  if (f.size() != sub.size()) throw input_error("mcshane_extend: value count mismatch");
  require_extension_constant(m, sub, f, L);
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    bool exact = false;
    for (std::size_t a = 0; a < sub.size(); ++a) {
      if (sub[a] == i) {
        out[i] = f[a];
        exact = true;
        break;
      }
      best = std::min(best, f[a] + L * m.distance(i, sub[a]));
    }
    if (!exact) out[i] = best;
  }
  return out;
}

namespace detail {
inline double mcshane_eval(const PointCloud& cloud, std::span<const std::size_t> sub,
                           std::span<const double> f, double L, const Point& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < sub.size(); ++a) {
    if (cloud.point(sub[a]) == x) return f[a];
    best = std::min(best, f[a] + L * cloud.distance_to(x, sub[a]));
  }
  return best;
}
}  // namespace detail

/// Ambient-query form: f lives on a subset of a PointCloud, the query is any
/// ambient point. Coordinate-identical queries return their data value.
inline double mcshane_extend(const PointCloud& cloud, std::span<const std::size_t> sub,
                             std::span<const double> f, double L, const Point& x) {
  if (sub.empty()) throw input_error("mcshane_extend: empty subdomain");
  if (f.size() != sub.size()) throw input_error("mcshane_extend: value count mismatch");
  require_extension_constant(cloud, sub, f, L);
  return detail::mcshane_eval(cloud, sub, f, L, x);
}

/// Same, validating the extension constant once for a batch of queries.
inline std::vector<double> mcshane_extend_batch(const PointCloud& cloud,
                                                std::span<const std::size_t> sub,
                                                std::span<const double> f, double L,
                                                std::span<const Point> queries) {
  if (sub.empty()) throw input_error("mcshane_extend: empty subdomain");
  if (f.size() != sub.size()) throw input_error("mcshane_extend: value count mismatch");
  require_extension_constant(cloud, sub, f, L);
  std::vector<double> out(queries.size());
  parallel_for_index(queries.size(), [&](std::size_t i) {
    out[i] = detail::mcshane_eval(cloud, sub, f, L, queries[i]);
  });
  return out;
}

}  // namespace liporos
