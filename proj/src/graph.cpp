#include "warpcone/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace warpcone {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 0) throw InputError("graph size must be non-negative");
  for (auto& e : edges) {
    if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n) throw InputError("edge endpoint out of range");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::erase_if(edges, [](const Edge& e) { return e.first == e.second; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  std::vector<std::size_t> deg(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[static_cast<std::size_t>(u) + 1];
    ++deg[static_cast<std::size_t>(v) + 1];
  }
  std::partial_sum(deg.begin(), deg.end(), deg.begin());
  offsets_ = deg;
  adjacency_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [u, v] : edges_) {
    adjacency_[fill[static_cast<std::size_t>(u)]++] = v;
    adjacency_[fill[static_cast<std::size_t>(v)]++] = u;
  }
  for (int v = 0; v < n_; ++v)
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(v)]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[static_cast<std::size_t>(v) + 1]));
}

Graph Graph::complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, std::move(e));
}

Graph Graph::cycle(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e));
}

Graph Graph::path(int n) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, std::move(e));
}

int Graph::max_degree() const {
  int best = 0;
  for (int v = 0; v < n_; ++v) best = std::max(best, degree(v));
  return best;
}

double Graph::mean_degree() const { return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(edges_.size()) / n_; }

bool Graph::has_edge(VertexId u, VertexId v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<int> Graph::bfs(VertexId source) const {
  std::vector<int> dist(static_cast<std::size_t>(n_), -1);
  std::queue<VertexId> q;
  dist[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop();
    for (VertexId v : neighbors(u)) {
      if (dist[static_cast<std::size_t>(v)] >= 0) continue;
      dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
      q.push(v);
    }
  }
  return dist;
}

bool Graph::connected() const {
  if (n_ <= 1) return true;
  const auto d = bfs(0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

Eigen::SparseMatrix<double> Graph::laplacian() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * edges_.size() + static_cast<std::size_t>(n_));
  for (const auto& [u, v] : edges_) {
    trip.emplace_back(u, v, -1.0);
    trip.emplace_back(v, u, -1.0);
  }
  for (int v = 0; v < n_; ++v) trip.emplace_back(v, v, static_cast<double>(degree(v)));
  Eigen::SparseMatrix<double> L(n_, n_);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

int count_components(int n, const std::vector<Edge>& edges) {
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int components = n;
  for (const auto& [u, v] : edges) {
    const int a = find(u), b = find(v);
    if (a != b) {
      parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      --components;
    }
  }
  return components;
}

}  // namespace warpcone
