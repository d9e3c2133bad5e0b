#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"
#include "liporos/kr.hpp"

namespace liporos {

// ---------------------------------------------------------------------------
// Kalton's dyadic decomposition: the tent weights
//
//   Λ_n(x) = 2^{-(n-1)} d(x,0) - 1   on 2^{n-1} <= d(x,0) <= 2^n
//          = 2 - 2^{-n} d(x,0)        on 2^n     <= d(x,0) <= 2^{n+1}
//          = 0                        otherwise
//
// form a partition of unity off the base point with at most two nonzero
// terms, and the multiplication operators <f, W_n(μ)> = <Λ_n·f, μ> split a
// molecule into annulus-supported layers with Σ‖W_n μ‖ <= 45‖μ‖.
// ---------------------------------------------------------------------------

inline double kalton_weight(int n, double dist_to_base) {
  double lo = std::ldexp(1.0, n - 1), mid = std::ldexp(1.0, n), hi = std::ldexp(1.0, n + 1);
  double t = dist_to_base;
  if (t >= lo && t <= mid) return std::ldexp(t, -(n - 1)) - 1.0;
  if (t > mid && t <= hi) return 2.0 - std::ldexp(t, -n);
  return 0.0;
}

template <PointMetric M>
double kalton_weight(const M& m, int n, std::size_t point) {
  return kalton_weight(n, m.distance(point, m.base_index()));
}

inline double kalton_weight(const Space& space, int n, const Point& x) {
  return kalton_weight(n, space.distance(x, space.base_point()));
}

/// Dyadic layer indices with Λ_n(t) possibly nonzero: at most two.
inline std::vector<int> kalton_active_layers(double dist_to_base) {
  std::vector<int> out;
  if (!(dist_to_base > 0.0)) return out;
  int n0 = static_cast<int>(std::floor(std::log2(dist_to_base)));
  for (int n = n0 - 1; n <= n0 + 2; ++n)
    if (kalton_weight(n, dist_to_base) != 0.0) out.push_back(n);
  return out;
}

struct KaltonLayer {
  int n = 0;
  Molecule layer;        // W_n(μ) = Σ a_i Λ_n(x_i) δ(x_i)
  double kr_norm = 0.0;  // ‖W_n μ‖, dual-route checked
};

struct KaltonDecomposition {
  std::vector<KaltonLayer> layers;  // ascending n, only layers meeting the support
  double molecule_norm = 0.0;
  double sum_layer_norms = 0.0;
  double ratio = 0.0;  // Σ‖W_n μ‖ / ‖μ‖
};

/// Splits μ into its dyadic layers, computes every layer norm, and asserts
/// the 45-bound with zero slack. The weight-list reconstruction
/// Σ_n W_n(μ) = μ is an exact identity (the tents sum to 1 off the base).
template <PointMetric M>
KaltonDecomposition kalton_decompose(const M& m, const Molecule& mu, double ratio_cap = 45.0,
                                     double lp_skew = 0.0) {
  KaltonDecomposition out;
  if (mu.empty()) return out;

  std::map<int, std::vector<MoleculeTerm>> by_layer;
  for (const auto& term : mu.support) {
    double t = m.distance(term.point, m.base_index());
    for (int n : kalton_active_layers(t))
      by_layer[n].push_back(MoleculeTerm{term.point, term.weight * kalton_weight(n, t)});
  }
  out.molecule_norm = kr_norm_detailed(m, mu, lp_skew).value;
  for (auto& [n, terms] : by_layer) {
    KaltonLayer layer;
    layer.n = n;
    layer.layer = make_molecule(m, terms);
    if (layer.layer.empty()) continue;
    layer.kr_norm = kr_norm_detailed(m, layer.layer, lp_skew).value;
    out.sum_layer_norms += layer.kr_norm;
    out.layers.push_back(std::move(layer));
  }
  out.ratio = out.molecule_norm > 0.0 ? out.sum_layer_norms / out.molecule_norm : 0.0;
  if (out.ratio > ratio_cap)
    throw check_error("kalton_decompose: layer norm ratio " + std::to_string(out.ratio) +
                      " exceeds the bound " + std::to_string(ratio_cap));
  return out;
}

/// Largest absolute error of the exact weight-list identity Σ_n W_n(μ) = μ.
template <PointMetric M>
double kalton_reconstruction_error(const M& m, const Molecule& mu,
                                   const KaltonDecomposition& dec) {
  std::map<std::size_t, double> sums;
  for (const auto& layer : dec.layers)
    for (const auto& t : layer.layer.support) sums[t.point] += t.weight;
  double worst = 0.0;
  for (const auto& t : mu.support) {
    double got = sums.count(t.point) ? sums[t.point] : 0.0;
    worst = std::max(worst, std::fabs(got - t.weight));
    sums.erase(t.point);
  }
  for (const auto& [p, w] : sums) worst = std::max(worst, std::fabs(w));
  (void)m;
  return worst;
}

}  // namespace liporos
