#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "liporos/core.hpp"
#include "liporos/space.hpp"

namespace liporos {

/// Finite pointed metric space given by a distance oracle over indices.
/// PointCloud, QuotientSpace and CachedMetric all model this concept; every
/// norm, scan and operator in the library is written against it.
template <class M>
concept PointMetric = requires(const M& m, std::size_t i, std::size_t j) {
  { m.size() } -> std::convertible_to<std::size_t>;
  { m.distance(i, j) } -> std::convertible_to<double>;
  { m.base_index() } -> std::convertible_to<std::size_t>;
};

// ---------------------------------------------------------------------------
// PointCloud: finite ordered set of ambient points with a designated base.
// ---------------------------------------------------------------------------

class PointCloud {
 public:
  PointCloud(Space space, std::vector<Point> points, std::size_t base_index = 0)
      : space_(std::move(space)), points_(std::move(points)), base_(base_index) {
    if (points_.empty()) throw input_error("PointCloud: empty point list");
    if (base_ >= points_.size()) throw input_error("PointCloud: base index out of range");
    for (const auto& p : points_) space_.check_point(p);
    check_distinct();
  }

  const Space& space() const { return space_; }
  std::size_t size() const { return points_.size(); }
  std::size_t base_index() const { return base_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }

  double distance(std::size_t i, std::size_t j) const {
    return space_.distance(points_[i], points_[j]);
  }

  double distance_to(const Point& x, std::size_t i) const {
    return space_.distance(x, points_[i]);
  }

  /// Distance from an ambient point to the whole cloud.
  double distance_to_cloud(const Point& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points_) best = std::min(best, space_.distance(x, p));
    return best;
  }

  /// Index of a nearest cloud point (lowest index on ties).
  std::size_t nearest_index(const Point& x) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      double d = space_.distance(x, points_[i]);
      if (d < best) {
        best = d;
        bi = i;
      }
    }
    return bi;
  }

  /// Indices of points inside the closed ball.
  std::vector<std::size_t> indices_in_ball(const Ball& b) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (space_.distance(b.center, points_[i]) <= b.radius) out.push_back(i);
    return out;
  }

 private:
  // Duplicates are detected on exact coordinates: distinct coordinate tuples
  // have positive distance in every metric, and the exact check is O(k log k).
  void check_distinct() const {
    std::vector<std::size_t> order(points_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return points_[a] < points_[b];
    });
    for (std::size_t i = 1; i < order.size(); ++i)
      if (points_[order[i - 1]] == points_[order[i]])
        throw input_error("PointCloud: duplicate point at indices " +
                          std::to_string(order[i - 1]) + " and " + std::to_string(order[i]));
  }

  Space space_;
  std::vector<Point> points_;
  std::size_t base_;
};

// ---------------------------------------------------------------------------
// CachedMetric: precomputed distance table over any PointMetric. Worth it
// when the same pairs are scanned repeatedly (CC distances especially).
// ---------------------------------------------------------------------------

class CachedMetric {
 public:
  template <PointMetric M>
  explicit CachedMetric(const M& m) : n_(m.size()), base_(m.base_index()), table_(n_ * n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) {
        double d = m.distance(i, j);
        table_[i * n_ + j] = d;
        table_[j * n_ + i] = d;
      }
  }

  std::size_t size() const { return n_; }
  std::size_t base_index() const { return base_; }
  double distance(std::size_t i, std::size_t j) const { return table_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::size_t base_;
  std::vector<double> table_;
};

/// View of a subset of a PointMetric as a metric space of its own, with a
/// chosen base inside the subset. Index i refers to subset position i.
template <PointMetric M>
class SubMetric {
 public:
  SubMetric(const M& parent, std::vector<std::size_t> indices, std::size_t base_pos)
      : parent_(&parent), ids_(std::move(indices)), base_(base_pos) {
    if (ids_.empty()) throw input_error("SubMetric: empty subset");
    if (base_ >= ids_.size()) throw input_error("SubMetric: base position out of range");
  }

  std::size_t size() const { return ids_.size(); }
  std::size_t base_index() const { return base_; }
  double distance(std::size_t i, std::size_t j) const {
    return parent_->distance(ids_[i], ids_[j]);
  }
  std::size_t parent_index(std::size_t i) const { return ids_[i]; }

 private:
  const M* parent_;
  std::vector<std::size_t> ids_;
  std::size_t base_;
};

}  // namespace liporos
