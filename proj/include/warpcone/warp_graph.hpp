#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <string>
#include <vector>

#include "warpcone/action.hpp"
#include "warpcone/graph.hpp"
#include "warpcone/net.hpp"

namespace warpcone {

enum class Variant { kFull, kType1Only };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

/// Sampled mass w_s(z, y) = mu(U_z intersect s^-1 U_y) for generator s.
struct WeightedArc {
  VertexId src = 0;
  VertexId dst = 0;
  int gen = 0;
  double weight = 0.0;
};

/// G(t): vertices are net points; type-1 edges witness U_y meeting s U_z,
/// type-2 edges join net points at distance <= 3/t.
class WarpedGraph {
 public:
  WarpedGraph() = default;
  /// `arcs` may include diagonal entries (self-loop mass); they are kept for
  /// mass conservation but never appear in edge sets.
  WarpedGraph(double t, int n, Variant variant, std::vector<int> generator_inverse, std::vector<WeightedArc> arcs,
              std::vector<Edge> type2, std::vector<double> cell_measures);

  double t() const { return t_; }
  int num_vertices() const { return n_; }
  Variant variant() const { return variant_; }
  int num_generators() const { return static_cast<int>(inverse_.size()); }
  const std::vector<int>& generator_inverse() const { return inverse_; }
  /// Sorted by (gen, src, dst), diagonal included.
  const std::vector<WeightedArc>& arcs() const { return arcs_; }
  const std::vector<Edge>& type2_edges() const { return type2_; }
  const std::vector<double>& cell_measures() const { return measures_; }

  Graph type1_graph() const;
  Graph type2_graph() const;
  /// Simple union of both types (an edge present in both counts once).
  Graph union_graph() const;

  /// W = (W_tot + W_tot^T) / 2 with W_tot = sum_s w_s; bitwise symmetric,
  /// diagonal included.
  Eigen::SparseMatrix<double> symmetrized_weights() const;
  /// Sum_y w_s(z, y) for every (s, z).
  std::vector<double> row_mass(int gen) const;

  // Sampling metadata.
  int n_per_cell = 0;
  std::uint64_t seed = 0;
  std::vector<int> accepted_per_cell;
  std::vector<std::string> warnings;

 private:
  double t_ = 0.0;
  int n_ = 0;
  Variant variant_ = Variant::kFull;
  std::vector<int> inverse_;
  std::vector<WeightedArc> arcs_;
  std::vector<Edge> type2_;
  std::vector<double> measures_;
};

struct GraphBuildOptions {
  int n_per_cell = 200;
  Variant variant = Variant::kFull;
  /// Rejection attempts per cell, times n_per_cell.
  int attempt_factor = 1000;
  int workers = 1;
};

/// Requires net.has_measures(). Each cell draws n_per_cell uniform samples
/// (rejection through assign_cell) from its own seeded stream; every sample u
/// adds mu(U_z) / accepted to w_s(z, owner(s u)).
WarpedGraph build_graph(const Net& net, const Action& action, std::uint64_t seed, const GraphBuildOptions& options = {});

struct DegreeReport {
  int max_type2 = 0;
  double mean_type2 = 0.0;
  std::vector<int> max_type1_per_gen;
  std::vector<double> mean_type1_per_gen;
  int max_total = 0;
  double mean_total = 0.0;
  double bound_type2 = 0.0;        // C 8^m
  double bound_type1_per_gen = 0.0;  // C (2L + 4)^m
  double bound_total = 0.0;        // C 8^m + #S C (2L + 4)^m
  bool violation = false;
};

DegreeReport degree_report(const WarpedGraph& graph, const AhlforsEstimate& ahlfors, const Action& action);

}  // namespace warpcone
