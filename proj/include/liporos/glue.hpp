#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"
#include "liporos/lipschitz.hpp"

namespace liporos {

// ---------------------------------------------------------------------------
// Glue / restrict: the inverse pair between Lip_0 of a union of blocks that
// meet only at x0 and the sup-normed product of the blocks. Gluing expands
// norms by at most 1/λ for a λ-separated family; restriction contracts.
// ---------------------------------------------------------------------------

/// A function on a block: indices into the parent metric plus values, with
/// the shared point x0 among the indices and value 0 there.
struct Block {
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

struct GlueResult {
  std::vector<std::size_t> union_indices;  // sorted parent indices of the union
  std::vector<double> values;              // aligned with union_indices
  double measured_lip = 0.0;               // exact pair scan over the union
  double bound = 0.0;                      // (max block norm) / λ
};

template <PointMetric M>
GlueResult glue(const M& m, const std::vector<Block>& blocks, std::size_t x0,
                double lambda_cert) {
  if (blocks.empty()) throw input_error("glue: no blocks");
  if (!(lambda_cert > 0.0)) throw input_error("glue: certificate lambda must be positive");
  std::map<std::size_t, double> merged;
  double max_norm = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Block& blk = blocks[b];
    if (blk.indices.size() != blk.values.size())
      throw input_error("glue: block " + std::to_string(b) + " has mismatched sizes");
    bool has_x0 = false;
    for (std::size_t k = 0; k < blk.indices.size(); ++k) {
      std::size_t idx = blk.indices[k];
      if (idx >= m.size()) throw input_error("glue: block index out of range");
      if (idx == x0) {
        has_x0 = true;
        if (blk.values[k] != 0.0)
          throw input_error("glue: block " + std::to_string(b) + " has f(x0) != 0");
      }
      auto [it, inserted] = merged.insert({idx, blk.values[k]});
      if (!inserted && idx != x0)
        throw input_error("glue: blocks overlap at point " + std::to_string(idx) +
                          " (only x0 may be shared)");
    }
    if (!has_x0) throw input_error("glue: block " + std::to_string(b) + " does not contain x0");
    if (blk.indices.size() >= 2) {
      SubMetric sub(m, blk.indices, 0);
      max_norm = std::max(max_norm, lip_norm(sub, blk.values));
    }
  }
  GlueResult out;
  for (auto& [idx, v] : merged) {
    out.union_indices.push_back(idx);
    out.values.push_back(v);
  }
  out.bound = std::isinf(lambda_cert) ? max_norm : max_norm / std::min(lambda_cert, 1.0);
  if (out.union_indices.size() >= 2) {
    SubMetric sub(m, out.union_indices, 0);
    out.measured_lip = lip_norm(sub, out.values);
  }
  if (out.measured_lip > out.bound + 1e-9 * std::max(1.0, out.bound))
    throw check_error("glue: measured norm " + std::to_string(out.measured_lip) +
                      " exceeds the certified bound " + std::to_string(out.bound));
  return out;
}

/// Blockwise restriction of f (given on union_indices); inverse of glue.
/// Block norms never exceed the norm of f.
template <PointMetric M>
std::vector<Block> restrict_blocks(const M& m, const std::vector<std::size_t>& union_indices,
                                   std::span<const double> values,
                                   const std::vector<std::vector<std::size_t>>& block_indices) {
  if (union_indices.size() != values.size())
    throw input_error("restrict_blocks: value count mismatch");
  std::map<std::size_t, double> lookup;
  for (std::size_t k = 0; k < union_indices.size(); ++k)
    lookup[union_indices[k]] = values[k];
  std::vector<Block> out;
  for (const auto& ids : block_indices) {
    Block blk;
    blk.indices = ids;
    for (std::size_t idx : ids) {
      auto it = lookup.find(idx);
      if (it == lookup.end())
        throw input_error("restrict_blocks: blocks do not cover point " + std::to_string(idx));
      blk.values.push_back(it->second);
    }
    out.push_back(std::move(blk));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tower restriction / limit: the finite shadow of the isometric embedding of
// Lip_0(M) into the sup-product over an increasingly dense tower (M_n), and
// of its left inverse. The ultrafilter limit of the proof is replaced by a
// finite surrogate: extend the last component by inf-convolution (or the
// Cesàro average of the last few), with an error bound tied to the covering
// radius of the last tower element.
// ---------------------------------------------------------------------------

struct TowerLevel {
  std::vector<std::size_t> indices;  // subset of the parent metric
  std::size_t base_pos = 0;          // position of 0_n inside `indices`
};

struct TowerRestriction {
  std::vector<std::vector<double>> components;  // rebased restrictions per level
  std::vector<double> component_norms;
  std::vector<double> running_max;  // s_N = max_{n<=N} component norm
  std::vector<std::size_t> degenerate_levels;  // singleton levels, norm pinned 0
};

template <PointMetric M>
TowerRestriction tower_restrict(const M& m, std::span<const double> values,
                                const std::vector<TowerLevel>& tower) {
  if (tower.empty()) throw input_error("tower_restrict: empty tower");
  if (values.size() != m.size()) throw input_error("tower_restrict: value count mismatch");
  // Tower base points must march toward the base of M.
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& lvl : tower) {
    if (lvl.base_pos >= lvl.indices.size())
      throw input_error("tower_restrict: level base position out of range");
    double d = m.distance(lvl.indices[lvl.base_pos], m.base_index());
    if (d > prev + 1e-12)
      throw input_error("tower_restrict: level base points do not approach the base of M");
    prev = d;
  }
  TowerRestriction out;
  double running = 0.0;
  for (std::size_t n = 0; n < tower.size(); ++n) {
    const auto& lvl = tower[n];
    std::vector<double> comp(lvl.indices.size());
    double at_base = values[lvl.indices[lvl.base_pos]];
    for (std::size_t k = 0; k < lvl.indices.size(); ++k)
      comp[k] = values[lvl.indices[k]] - at_base;
    double norm = 0.0;
    if (lvl.indices.size() >= 2) {
      SubMetric sub(m, lvl.indices, lvl.base_pos);
      norm = lip_norm(sub, comp);
    } else {
      out.degenerate_levels.push_back(n);
    }
    running = std::max(running, norm);
    out.components.push_back(std::move(comp));
    out.component_norms.push_back(norm);
    out.running_max.push_back(running);
  }
  return out;
}

struct TowerLimit {
  std::vector<double> values;  // function on all of M, 0 at the base
  double error_bound = 0.0;    // sup-norm bound for the round trip from a true f
};

/// Finite surrogate for the ultrafilter limit. `cesaro_k` = 1 extends the
/// last component only (default); k > 1 averages the extensions of the last
/// k components. For components produced by tower_restrict(f) with a full
/// last level, the round trip returns f exactly.
template <PointMetric M>
TowerLimit tower_limit(const M& m, const std::vector<TowerLevel>& tower,
                       const std::vector<std::vector<double>>& components,
                       std::size_t cesaro_k = 1) {
  if (tower.empty() || components.size() != tower.size())
    throw input_error("tower_limit: component/tower mismatch");
  if (cesaro_k == 0 || cesaro_k > tower.size())
    throw input_error("tower_limit: cesaro window out of range");
  for (std::size_t n = 0; n < tower.size(); ++n)
    if (components[n].size() != tower[n].indices.size())
      throw input_error("tower_limit: component " + std::to_string(n) + " size mismatch");

  std::vector<double> acc(m.size(), 0.0);
  double max_norm = 0.0, max_cov = 0.0, max_base_gap = 0.0;
  for (std::size_t n = tower.size() - cesaro_k; n < tower.size(); ++n) {
    const auto& lvl = tower[n];
    double norm = 0.0;
    if (lvl.indices.size() >= 2) {
      SubMetric sub(m, lvl.indices, lvl.base_pos);
      norm = lip_norm(sub, components[n]);
    }
    std::vector<double> ext = mcshane_extend_all(m, lvl.indices, components[n], norm);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += ext[i];
    // Covering radius of the level inside M and distance from the level to
    // the base drive the surrogate error.
    double cov = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t idx : lvl.indices) best = std::min(best, m.distance(i, idx));
      cov = std::max(cov, best);
    }
    double base_gap = std::numeric_limits<double>::infinity();
    for (std::size_t idx : lvl.indices)
      base_gap = std::min(base_gap, m.distance(m.base_index(), idx));
    max_norm = std::max(max_norm, norm);
    max_cov = std::max(max_cov, cov);
    max_base_gap = std::max(max_base_gap, base_gap);
  }
  TowerLimit out;
  out.values.resize(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out.values[i] = acc[i] / double(cesaro_k);
  double shift = out.values[m.base_index()];
  for (double& v : out.values) v -= shift;
  out.error_bound = 2.0 * max_norm * (max_cov + max_base_gap);
  return out;
}

}  // namespace liporos
