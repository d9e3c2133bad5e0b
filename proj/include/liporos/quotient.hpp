#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "liporos/cloud.hpp"
#include "liporos/core.hpp"

namespace liporos {

// ---------------------------------------------------------------------------
// M/A: the subset A collapsed to a single class point, which becomes the
// base. d(x,y) = min{d(x,y), d(x,A)+d(y,A)} off A, d(x, class) = d(x,A).
// ---------------------------------------------------------------------------

class QuotientSpace {
 public:
  /// Index 0 of the quotient is the A-class; index i >= 1 corresponds to the
  /// i-th surviving parent point (in parent order).
  template <PointMetric M>
  QuotientSpace(const M& parent, const std::vector<std::size_t>& subset, bool verify = true) {
    std::size_t n = parent.size();
    std::vector<char> in_a(n, 0);
    for (std::size_t a : subset) {
      if (a >= n) throw input_error("quotient_metric: subset index out of range");
      in_a[a] = 1;
    }
    if (subset.empty()) throw input_error("quotient_metric: empty subset");
    for (std::size_t i = 0; i < n; ++i)
      if (!in_a[i]) parent_ids_.push_back(i);
    if (parent_ids_.empty()) throw input_error("quotient_metric: subset covers the whole cloud");

    std::size_t k = parent_ids_.size();
    dist_to_a_.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a : subset) best = std::min(best, parent.distance(parent_ids_[i], a));
      dist_to_a_[i] = best;
    }
    table_.assign((k + 1) * (k + 1), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      at(0, i + 1) = at(i + 1, 0) = dist_to_a_[i];
      for (std::size_t j = i + 1; j < k; ++j) {
        double d = std::min(parent.distance(parent_ids_[i], parent_ids_[j]),
                            dist_to_a_[i] + dist_to_a_[j]);
        at(i + 1, j + 1) = at(j + 1, i + 1) = d;
      }
    }
    if (verify) verify_triangle();
  }

  std::size_t size() const { return parent_ids_.size() + 1; }
  std::size_t base_index() const { return 0; }
  double distance(std::size_t i, std::size_t j) const { return table_[i * size() + j]; }

  /// Parent index of quotient point i >= 1.
  std::size_t parent_index(std::size_t i) const { return parent_ids_.at(i - 1); }
  const std::vector<std::size_t>& surviving_parent_indices() const { return parent_ids_; }
  double distance_to_class(std::size_t i) const { return dist_to_a_.at(i - 1); }

 private:
  double& at(std::size_t i, std::size_t j) { return table_[i * (parent_ids_.size() + 1) + j]; }

  // The quotient formula cannot violate the triangle inequality; a violation
  // means the parent distance oracle is broken.
  void verify_triangle() const {
    std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double dij = distance(i, j);
        if (dij <= 0.0)
          throw internal_error("quotient_metric: zero distance between distinct classes " +
                               std::to_string(i) + "," + std::to_string(j));
        for (std::size_t l = 0; l < n; ++l) {
          if (dij > distance(i, l) + distance(l, j) + 1e-12)
            throw internal_error("quotient_metric: triangle inequality violated at (" +
                                 std::to_string(i) + "," + std::to_string(j) + "," +
                                 std::to_string(l) + ")");
        }
      }
  }

  std::vector<std::size_t> parent_ids_;
  std::vector<double> dist_to_a_;
  std::vector<double> table_;
};

template <PointMetric M>
QuotientSpace quotient_metric(const M& parent, const std::vector<std::size_t>& subset,
                              bool verify = true) {
  return QuotientSpace(parent, subset, verify);
}

// ---------------------------------------------------------------------------
// Nearest-point retraction onto a subset, ties broken by lowest index.
// ---------------------------------------------------------------------------

struct Retraction {
  std::vector<std::size_t> map;  // point index -> subset member (parent index)
  double lip_constant = 0.0;
  SlopeWitness witness;  // pair realizing the constant, slope = constant
};

template <PointMetric M>
Retraction nearest_point_retraction(const M& m, const std::vector<std::size_t>& subset) {
  if (subset.empty()) throw input_error("nearest_point_retraction: empty subset");
  std::size_t n = m.size();
  std::vector<std::size_t> sorted(subset);
  std::sort(sorted.begin(), sorted.end());
  Retraction r;
  r.map.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = sorted.front();
    for (std::size_t a : sorted) {
      double d = m.distance(i, a);
      if (d < best) {
        best = d;
        bi = a;
      }
    }
    r.map[i] = bi;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = m.distance(i, j);
      double s = m.distance(r.map[i], r.map[j]) / d;
      if (s > r.lip_constant) {
        r.lip_constant = s;
        r.witness = {i, j, s};
      }
    }
  return r;
}

}  // namespace liporos
