#pragma once

#include <Eigen/Sparse>
#include <span>
#include <utility>
#include <vector>

#include "warpcone/types.hpp"

namespace warpcone {

using Edge = std::pair<VertexId, VertexId>;

/// Simple undirected graph in CSR form. Loops and duplicate edges are
/// dropped on construction; edges are stored once with first < second.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<Edge> edges);

  static Graph complete(int n);
  static Graph cycle(int n);
  static Graph path(int n);

  int num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const VertexId> neighbors(VertexId v) const {
    const auto b = offsets_[static_cast<std::size_t>(v)], e = offsets_[static_cast<std::size_t>(v) + 1];
    return {adjacency_.data() + b, static_cast<std::size_t>(e - b)};
  }
  int degree(VertexId v) const { return static_cast<int>(neighbors(v).size()); }
  int max_degree() const;
  double mean_degree() const;
  bool has_edge(VertexId u, VertexId v) const;

  /// Hop distances from `source`; -1 marks unreachable vertices.
  std::vector<int> bfs(VertexId source) const;
  bool connected() const;
  /// Combinatorial Laplacian Deg - Adj.
  Eigen::SparseMatrix<double> laplacian() const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> adjacency_;
};

/// Connected components by union-find over the edge list.
int count_components(int n, const std::vector<Edge>& edges);

}  // namespace warpcone
