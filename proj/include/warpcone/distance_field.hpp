#pragma once

#include <cstdint>
#include <vector>

#include "warpcone/action.hpp"
#include "warpcone/warp_graph.hpp"

namespace warpcone {

/// Approximation of the warped metric d_Gamma on the level tY.
///
/// A regular lattice with spacing h = 1/ceil(rho t) stands in for Y. Lattice
/// neighbours within `stencil` steps along primitive directions are joined by
/// metric edges of length t d(x, y); every node x also gets a warp edge of
/// length 1 to the node nearest s x, for each generator s. Shortest paths in
/// this graph follow the chain description of d_Gamma: alternating short
/// metric hops and generator jumps.
class WarpedDistanceField {
 public:
  WarpedDistanceField(const Action& action, double t, int rho = 8, int stencil = 2);

  double t() const { return t_; }
  int rho() const { return rho_; }
  int num_nodes() const { return static_cast<int>(coords_.size()); }
  int node_of(const Point& x) const;
  const Point& node_point(int node) const { return coords_[static_cast<std::size_t>(node)]; }

  /// Shortest-path estimate of d_Gamma(tx, ty).
  double warped_distance(const Point& x, const Point& y) const;
  /// Distances from the node of x to every lattice node.
  std::vector<double> distances_from(const Point& x) const;

  /// Worst additive error of one warp hop caused by snapping s x to the
  /// lattice: t h sqrt(d) (1 + L) / 2.
  double snap_slack() const;

 private:
  double dijkstra(int source, int target, std::vector<double>* all) const;

  double t_;
  int rho_;
  int per_dim_;
  int dim_;
  double max_lipschitz_;
  std::vector<Point> coords_;
  struct Step {
    std::vector<int> offset;
    double length;
  };
  std::vector<Step> stencil_;
  int num_generators_;
  std::vector<int> warp_target_;  // node * #S + s
};

inline double warped_distance(const WarpedDistanceField& field, const Point& x, const Point& y) {
  return field.warped_distance(x, y);
}

struct BilipschitzReport {
  int n_pairs = 0;
  int violations = 0;
  double slack = 2.0;
  double worst_upper_ratio = 0.0;  // max d_Gamma / d_G over pairs with d_G > 0
  double worst_lower_ratio = 0.0;  // max d_G / ceil(d_Gamma) over pairs with d_Gamma > 0
  double worst_upper_excess = -1e300;  // max d_Gamma - 3 d_G
  double worst_lower_excess = -1e300;  // max d_G - 2 ceil(d_Gamma)
  struct Pair {
    VertexId z, y;
    int graph_distance;
    double warped_distance;
  };
  std::vector<Pair> pairs;
};

/// Samples vertex pairs and checks d_Gamma <= 3 d_G + slack and
/// d_G <= 2 ceil(d_Gamma) + slack. Failures are counted, not thrown.
BilipschitzReport bilipschitz_check(const WarpedGraph& graph, const Net& net, const WarpedDistanceField& field, int n_pairs,
                                    std::uint64_t seed, double slack = 2.0);

}  // namespace warpcone
