#pragma once

#include <functional>
#include <vector>

#include "warpcone/space.hpp"

namespace warpcone {

/// Bucket grid over the chart [0,1)^d with periodic wrap. Bucket width is
/// 1/floor(1/min_width), i.e. never narrower than the requested width.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(const Space* space, double min_width);

  void insert(VertexId id, const Point& p);
  int size() const { return static_cast<int>(points_.size()); }
  const Point& point(VertexId id) const { return points_[static_cast<std::size_t>(id)]; }
  double bucket_width() const { return width_; }

  /// Calls fn(id, distance) for every indexed point with distance <= r.
  void for_each_within(const Point& x, double r, const std::function<void(VertexId, double)>& fn) const;
  /// True if some indexed point lies at distance < r.
  bool any_closer_than(const Point& x, double r) const;
  /// Nearest indexed point; exact ties (within 1e-12) go to the lowest id.
  /// Returns -1 on an empty index.
  VertexId nearest(const Point& x, double* dist = nullptr) const;

 private:
  int bucket_coord(double v) const;
  std::size_t bucket_of(const Point& p) const;
  template <typename Fn>
  void visit_block(const Point& x, int radius, Fn&& fn) const;

  const Space* space_ = nullptr;
  int dim_ = 0;
  int per_dim_ = 1;
  double width_ = 1.0;
  std::vector<std::vector<VertexId>> buckets_;
  std::vector<Point> points_;
};

}  // namespace warpcone
