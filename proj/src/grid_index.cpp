#include "warpcone/grid_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace warpcone {

namespace {
constexpr double kTieEps = 1e-12;
}

GridIndex::GridIndex(const Space* space, double min_width) : space_(space), dim_(space->dim()) {
  if (!(min_width > 0.0)) throw InputError("bucket width must be positive");
  per_dim_ = std::max(1, static_cast<int>(std::floor(1.0 / min_width)));
  // Keep the bucket count bounded for fine widths in higher dimension.
  while (std::pow(static_cast<double>(per_dim_), dim_) > 4e6) per_dim_ /= 2;
  width_ = 1.0 / per_dim_;
  std::size_t total = 1;
  for (int i = 0; i < dim_; ++i) total *= static_cast<std::size_t>(per_dim_);
  buckets_.resize(total);
}

int GridIndex::bucket_coord(double v) const {
  int b = static_cast<int>(std::floor(v * per_dim_));
  b %= per_dim_;
  if (b < 0) b += per_dim_;
  return b;
}

std::size_t GridIndex::bucket_of(const Point& p) const {
  std::size_t id = 0;
  for (int i = dim_ - 1; i >= 0; --i) id = id * static_cast<std::size_t>(per_dim_) + static_cast<std::size_t>(bucket_coord(p[i]));
  return id;
}

void GridIndex::insert(VertexId id, const Point& p) {
  if (id != size()) throw InputError("grid index ids must be inserted densely");
  points_.push_back(p);
  buckets_[bucket_of(p)].push_back(id);
}

template <typename Fn>
void GridIndex::visit_block(const Point& x, int radius, Fn&& fn) const {
  // Offsets per dimension, deduplicated once the block wraps around.
  const int span = std::min(2 * radius + 1, per_dim_);
  std::array<int, kMaxDim> base{};
  for (int i = 0; i < dim_; ++i) base[static_cast<std::size_t>(i)] = bucket_coord(x[i]) - (span == per_dim_ ? 0 : radius);
  std::array<int, kMaxDim> off{};
  while (true) {
    std::size_t id = 0;
    for (int i = dim_ - 1; i >= 0; --i) {
      int c = (base[static_cast<std::size_t>(i)] + off[static_cast<std::size_t>(i)]) % per_dim_;
      if (c < 0) c += per_dim_;
      id = id * static_cast<std::size_t>(per_dim_) + static_cast<std::size_t>(c);
    }
    for (VertexId v : buckets_[id]) fn(v);
    int k = 0;
    while (k < dim_) {
      if (++off[static_cast<std::size_t>(k)] < span) break;
      off[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == dim_) break;
  }
}

void GridIndex::for_each_within(const Point& x, double r, const std::function<void(VertexId, double)>& fn) const {
  const int radius = static_cast<int>(std::ceil(r / width_ - 1e-12));
  visit_block(x, std::max(radius, 1), [&](VertexId v) {
    const double d = space_->distance(x, points_[static_cast<std::size_t>(v)]);
    if (d <= r) fn(v, d);
  });
}

bool GridIndex::any_closer_than(const Point& x, double r) const {
  const int radius = std::max(1, static_cast<int>(std::ceil(r / width_ - 1e-12)));
  bool found = false;
  visit_block(x, radius, [&](VertexId v) {
    if (!found && space_->distance(x, points_[static_cast<std::size_t>(v)]) < r) found = true;
  });
  return found;
}

VertexId GridIndex::nearest(const Point& x, double* dist) const {
  if (points_.empty()) return -1;
  for (int radius = 1;; radius *= 2) {
    double best = std::numeric_limits<double>::infinity();
    VertexId best_id = -1;
    visit_block(x, radius, [&](VertexId v) {
      const double d = space_->distance(x, points_[static_cast<std::size_t>(v)]);
      if (d < best - kTieEps || (d <= best + kTieEps && (best_id < 0 || v < best_id))) {
        best = std::min(best, d);
        best_id = v;
      }
    });
    // Anything outside the block is at least radius * width away.
    const bool whole = 2 * radius + 1 >= per_dim_;
    if (whole || (best_id >= 0 && best < radius * width_ - kTieEps)) {
      if (dist) *dist = best;
      return best_id;
    }
  }
}

}  // namespace warpcone
