#include "warpcone/distance_field.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace warpcone {
namespace {

int gcd_all(const std::vector<int>& v) {
  int g = 0;
  for (int x : v) g = std::gcd(g, std::abs(x));
  return g;
}

}  // namespace

WarpedDistanceField::WarpedDistanceField(const Action& action, double t, int rho, int stencil)
    : t_(t), rho_(rho), dim_(action.space().dim()), max_lipschitz_(action.max_lipschitz()) {
  if (!(t > 0.0)) throw InputError("level t must be positive");
  if (rho < 4) throw InputError("distance field resolution rho must be >= 4");
  if (stencil < 1) throw InputError("stencil radius must be >= 1");
  per_dim_ = static_cast<int>(std::ceil(rho * t));
  std::size_t total = 1;
  for (int i = 0; i < dim_; ++i) total *= static_cast<std::size_t>(per_dim_);
  if (total > 50'000'000) throw InputError("distance field lattice too large");
  const double h = 1.0 / per_dim_;

  coords_.resize(total);
  std::vector<int> idx(static_cast<std::size_t>(dim_), 0);
  for (std::size_t node = 0; node < total; ++node) {
    std::size_t rem = node;
    Point p(dim_);
    for (int i = 0; i < dim_; ++i) {
      p[i] = static_cast<double>(rem % static_cast<std::size_t>(per_dim_)) * h;
      rem /= static_cast<std::size_t>(per_dim_);
    }
    coords_[node] = p;
  }

  // Primitive lattice directions within the stencil box.
  std::vector<int> off(static_cast<std::size_t>(dim_), -stencil);
  while (true) {
    if (gcd_all(off) == 1) {
      double len2 = 0.0;
      for (int o : off) len2 += static_cast<double>(o) * o;
      stencil_.push_back({off, t * h * std::sqrt(len2)});
    }
    int k = 0;
    while (k < dim_ && ++off[static_cast<std::size_t>(k)] > stencil) off[static_cast<std::size_t>(k++)] = -stencil;
    if (k == dim_) break;
  }

  num_generators_ = action.size();
  warp_target_.resize(total * static_cast<std::size_t>(num_generators_));
  for (std::size_t node = 0; node < total; ++node)
    for (int s = 0; s < num_generators_; ++s)
      warp_target_[node * static_cast<std::size_t>(num_generators_) + static_cast<std::size_t>(s)] =
          node_of(action.apply(s, coords_[node]));
}

int WarpedDistanceField::node_of(const Point& x) const {
  if (x.dim() != dim_) throw InputError("point dimension does not match space");
  std::size_t id = 0;
  for (int i = dim_ - 1; i >= 0; --i) {
    long long c = std::llround(x[i] * per_dim_) % per_dim_;
    if (c < 0) c += per_dim_;
    id = id * static_cast<std::size_t>(per_dim_) + static_cast<std::size_t>(c);
  }
  return static_cast<int>(id);
}

double WarpedDistanceField::snap_slack() const {
  return t_ * std::sqrt(static_cast<double>(dim_)) * (1.0 + max_lipschitz_) / (2.0 * per_dim_);
}

double WarpedDistanceField::dijkstra(int source, int target, std::vector<double>* all) const {
  const std::size_t total = coords_.size();
  std::vector<double> dist(total, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<std::size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  std::vector<int> digits(static_cast<std::size_t>(dim_));
  std::vector<std::size_t> stride(static_cast<std::size_t>(dim_), 1);
  for (int i = 1; i < dim_; ++i) stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i - 1)] * static_cast<std::size_t>(per_dim_);

  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[static_cast<std::size_t>(u)]) continue;
    if (u == target && !all) return du;
    auto relax = [&](int v, double w) {
      const double nd = du + w;
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        heap.emplace(nd, v);
      }
    };
    std::size_t rem = static_cast<std::size_t>(u);
    for (int i = 0; i < dim_; ++i) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(per_dim_));
      rem /= static_cast<std::size_t>(per_dim_);
    }
    for (const auto& step : stencil_) {
      std::size_t v = 0;
      for (int i = 0; i < dim_; ++i) {
        int c = (digits[static_cast<std::size_t>(i)] + step.offset[static_cast<std::size_t>(i)]) % per_dim_;
        if (c < 0) c += per_dim_;
        v += static_cast<std::size_t>(c) * stride[static_cast<std::size_t>(i)];
      }
      relax(static_cast<int>(v), step.length);
    }
    for (int s = 0; s < num_generators_; ++s)
      relax(warp_target_[static_cast<std::size_t>(u) * static_cast<std::size_t>(num_generators_) + static_cast<std::size_t>(s)], 1.0);
  }
  if (all) {
    *all = std::move(dist);
    return target >= 0 ? (*all)[static_cast<std::size_t>(target)] : 0.0;
  }
  throw std::logic_error("warped distance field is disconnected");
}

double WarpedDistanceField::warped_distance(const Point& x, const Point& y) const {
  return dijkstra(node_of(x), node_of(y), nullptr);
}

std::vector<double> WarpedDistanceField::distances_from(const Point& x) const {
  std::vector<double> all;
  dijkstra(node_of(x), -1, &all);
  return all;
}

BilipschitzReport bilipschitz_check(const WarpedGraph& graph, const Net& net, const WarpedDistanceField& field, int n_pairs,
                                    std::uint64_t seed, double slack) {
  if (net.size() != graph.num_vertices()) throw InputError("net and graph sizes differ");
  BilipschitzReport r;
  r.n_pairs = n_pairs;
  r.slack = slack;
  const Graph g = graph.union_graph();
  Rng rng(substream(seed, "bilipschitz"));
  const auto n = static_cast<std::uint64_t>(g.num_vertices());
  for (int i = 0; i < n_pairs; ++i) {
    const auto z = static_cast<VertexId>(rng.below(n));
    const auto y = static_cast<VertexId>(rng.below(n));
    const int dg = g.bfs(z)[static_cast<std::size_t>(y)];
    const double dw = field.warped_distance(net.point(z), net.point(y));
    r.pairs.push_back({z, y, dg, dw});
    if (dg < 0) {
      ++r.violations;
      continue;
    }
    const double up = dw - 3.0 * dg;
    const double lo = dg - 2.0 * std::ceil(dw);
    r.worst_upper_excess = std::max(r.worst_upper_excess, up);
    r.worst_lower_excess = std::max(r.worst_lower_excess, lo);
    if (dg > 0) r.worst_upper_ratio = std::max(r.worst_upper_ratio, dw / dg);
    if (dw > 0) r.worst_lower_ratio = std::max(r.worst_lower_ratio, dg / std::ceil(dw));
    if (up > slack || lo > slack) ++r.violations;
  }
  return r;
}

}  // namespace warpcone
