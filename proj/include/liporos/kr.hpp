#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"

namespace liporos {

// ---------------------------------------------------------------------------
// Molecules: finitely supported signed combinations Σ a_i δ(x_i). δ(0) = 0,
// so any weight at the base point is dropped on construction.
// ---------------------------------------------------------------------------

struct MoleculeTerm {
  std::size_t point = 0;
  double weight = 0.0;
};

struct Molecule {
  std::vector<MoleculeTerm> support;
  bool empty() const { return support.empty(); }
  double total_weight() const {
    double s = 0.0;
    for (const auto& t : support) s += t.weight;
    return s;
  }
};

template <PointMetric M>
Molecule make_molecule(const M& m, std::vector<MoleculeTerm> terms) {
  Molecule mu;
  std::vector<char> seen(m.size(), 0);
  for (auto& t : terms) {
    if (t.point >= m.size()) throw input_error("Molecule: point index out of range");
    if (!std::isfinite(t.weight)) throw input_error("Molecule: non-finite weight");
    if (t.point == m.base_index() || t.weight == 0.0) continue;
    if (seen[t.point]) throw input_error("Molecule: duplicate support index");
    seen[t.point] = 1;
    mu.support.push_back(t);
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Dense tableau simplex for  max c·x  s.t.  A x <= b, x >= 0,  with b >= 0
// (slack basis feasible). Dantzig entering rule with a Bland fallback for
// termination; lowest-index tie break in the ratio test keeps runs
// deterministic.
// ---------------------------------------------------------------------------

namespace detail {

struct SimplexResult {
  double value = 0.0;
  std::vector<double> x;
};

inline SimplexResult simplex_max(const std::vector<std::vector<double>>& A,
                                 const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t m = A.size(), n = c.size();
  constexpr double eps = 1e-11;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0.0) throw internal_error("simplex_max: negative right-hand side");
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  const std::size_t dantzig_cap = 5000, hard_cap = 100000;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > hard_cap) throw numeric_error("simplex_max: iteration cap reached", 0.0);
    std::size_t enter = n + m;
    if (iter < dantzig_cap) {
      double best = -eps;
      for (std::size_t j = 0; j < n + m; ++j)
        if (t[m][j] < best) {
          best = t[m][j];
          enter = j;
        }
    } else {  // Bland
      for (std::size_t j = 0; j < n + m; ++j)
        if (t[m][j] < -eps) {
          enter = j;
          break;
        }
    }
    if (enter == n + m) break;  // optimal
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
      if (t[i][enter] > eps) {
        double ratio = t[i][n + m] / t[i][enter];
        if (ratio < best_ratio - eps ||
            (ratio < best_ratio + eps && (leave == m || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    if (leave == m) throw internal_error("simplex_max: unbounded LP (the KR polytope is compact)");
    double piv = t[leave][enter];
    for (auto& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  SimplexResult res;
  res.value = t[m][n + m];
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = t[i][n + m];
  return res;
}

// ---------------------------------------------------------------------------
// Successive shortest paths for the transportation problem on the molecule's
// signed weights: surplus nodes ship to deficit nodes at metric cost, the
// base point absorbing the net imbalance. Metric costs make direct edges
// optimal, so the graph is complete bipartite; potentials keep reduced costs
// nonnegative so plain Dijkstra applies throughout.
// ---------------------------------------------------------------------------

inline double transport_min_cost(const std::vector<double>& supply,
                                 const std::vector<std::vector<double>>& cost) {
  const std::size_t n = supply.size();
  const double inf = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (double s : supply) scale = std::max(scale, std::fabs(s));
  const double eps = std::max(1e-15, 1e-14 * scale);

  std::vector<double> excess(supply);
  std::vector<std::vector<double>> flow(n, std::vector<double>(n, 0.0));
  std::vector<double> pot(n, 0.0);
  double total = 0.0;

  std::size_t guard = 0;
  const std::size_t guard_cap = 200 * n * n + 1000;
  for (;;) {
    bool surplus_left = false;
    for (std::size_t i = 0; i < n; ++i)
      if (excess[i] > eps) {
        surplus_left = true;
        break;
      }
    if (!surplus_left) break;
    if (++guard > guard_cap) throw internal_error("transport_min_cost: augmentation cap reached");

    // Multi-source Dijkstra over the residual graph with reduced costs.
    // Arcs u->v: the direct edge (cost d, unlimited) and, when flow v->u is
    // positive, its reversal (cost -d, capacity flow[v][u]).
    std::vector<double> dist(n, inf);
    std::vector<std::size_t> prev(n, n);
    std::vector<char> via_reverse(n, 0), done(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (excess[i] > eps) dist[i] = 0.0;
    for (;;) {
      std::size_t u = n;
      double du = inf;
      for (std::size_t i = 0; i < n; ++i)
        if (!done[i] && dist[i] < du) {
          du = dist[i];
          u = i;
        }
      if (u == n) break;
      done[u] = 1;
      for (std::size_t v = 0; v < n; ++v) {
        if (v == u || done[v]) continue;
        double rc = cost[u][v] + pot[u] - pot[v];
        bool rev = false;
        if (flow[v][u] > eps) {
          double rb = -cost[v][u] + pot[u] - pot[v];
          if (rb < rc) {
            rc = rb;
            rev = true;
          }
        }
        if (rc < 0.0) rc = 0.0;  // rounding guard; invariant keeps rc >= 0
        if (dist[u] + rc < dist[v]) {
          dist[v] = dist[u] + rc;
          prev[v] = u;
          via_reverse[v] = rev ? 1 : 0;
        }
      }
    }

    std::size_t target = n;
    for (std::size_t i = 0; i < n; ++i)
      if (excess[i] < -eps && dist[i] < inf && (target == n || dist[i] < dist[target])) target = i;
    if (target == n)
      throw internal_error("transport_min_cost: no augmenting path (unbalanced supplies)");

    std::size_t source = target;
    while (prev[source] != n) source = prev[source];
    double amount = std::min(excess[source], -excess[target]);
    for (std::size_t v = target; prev[v] != n; v = prev[v])
      if (via_reverse[v]) amount = std::min(amount, flow[v][prev[v]]);

    for (std::size_t v = target; prev[v] != n; v = prev[v]) {
      std::size_t u = prev[v];
      if (via_reverse[v]) {
        flow[v][u] -= amount;
        total -= cost[v][u] * amount;
      } else {
        flow[u][v] += amount;
        total += cost[u][v] * amount;
      }
    }
    excess[source] -= amount;
    excess[target] += amount;
    double dt = dist[target];
    for (std::size_t i = 0; i < n; ++i) pot[i] += dist[i] < dt ? dist[i] : dt;
  }
  return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// kr_norm: the free-space norm of a molecule, computed twice.
//   * LP route: maximize Σ a_i f(x_i) over potentials with f(0) = 0 and all
//     pairwise slopes <= 1 (dense simplex over the support ∪ {0}).
//   * Flow route: minimum transport cost routing the signed weights, net
//     imbalance absorbed at the base point.
// The routes are independent implementations and must agree within 1e-8;
// disagreement is a solver bug, not data.
// ---------------------------------------------------------------------------

struct KrResult {
  double value = 0.0;       // the certified norm (flow route)
  double lp_value = 0.0;    // potential-LP route
  double flow_value = 0.0;  // min-cost-flow route
  std::vector<double> potentials;  // optimal f on the support (LP route)
};

template <PointMetric M>
KrResult kr_norm_detailed(const M& m, const Molecule& mu, double lp_skew = 0.0) {
  KrResult out;
  if (mu.empty()) return out;
  const std::size_t k = mu.support.size();
  const std::size_t base = m.base_index();

  // Distances among support ∪ {base}; node k is the base.
  std::vector<std::vector<double>> d(k + 1, std::vector<double>(k + 1, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    d[i][k] = d[k][i] = m.distance(mu.support[i].point, base);
    for (std::size_t j = i + 1; j < k; ++j)
      d[i][j] = d[j][i] = m.distance(mu.support[i].point, mu.support[j].point);
  }

  // --- LP route. Variables g_i = f_i + d(i,0) >= 0; every right-hand side
  // is nonnegative by the triangle inequality, so the slack basis starts
  // feasible.
  {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    std::vector<double> c(k);
    double shift = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      c[i] = mu.support[i].weight;
      shift += mu.support[i].weight * d[i][k];
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        std::vector<double> row(k, 0.0);
        row[i] = 1.0;
        row[j] = -1.0;
        A.push_back(std::move(row));
        // Nonnegative by the triangle inequality; colinear supports can
        // round it a few ulps below zero.
        b.push_back(std::max(d[i][j] + d[i][k] - d[j][k], 0.0));
      }
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> row(k, 0.0);
      row[i] = 1.0;
      A.push_back(std::move(row));
      b.push_back(2.0 * d[i][k]);
    }
    auto res = detail::simplex_max(A, b, c);
    out.lp_value = res.value - shift + lp_skew;
    out.potentials.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.potentials[i] = res.x[i] - d[i][k];
  }

  // --- Flow route. Node k (the base) absorbs the net imbalance.
  {
    std::vector<double> supply(k + 1, 0.0);
    for (std::size_t i = 0; i < k; ++i) supply[i] = mu.support[i].weight;
    supply[k] = -mu.total_weight();
    out.flow_value = detail::transport_min_cost(supply, d);
  }

  out.value = out.flow_value;
  double tol = 1e-8 * std::max(1.0, std::fabs(out.flow_value));
  if (std::fabs(out.lp_value - out.flow_value) > tol)
    throw internal_error("kr_norm: LP and flow routes disagree (" +
                         std::to_string(out.lp_value) + " vs " +
                         std::to_string(out.flow_value) + ")");
  return out;
}

template <PointMetric M>
double kr_norm(const M& m, const Molecule& mu) {
  return kr_norm_detailed(m, mu).value;
}

}  // namespace liporos
