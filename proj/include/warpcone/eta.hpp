#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "warpcone/graph.hpp"
#include "warpcone/warp_graph.hpp"

namespace warpcone {

struct EtaOptions {
  double p = 2.0;
  int target_dim = 1;
  int restarts = 8;
  std::uint64_t seed = 0;
  int max_iter = 400;
  double tol = 1e-10;
  /// Seed the p != 2 search with the p = 2 minimizer.
  bool spectral_warm_start = true;
  /// p = 1 is solved exactly over all vertex subsets up to this size.
  int exhaustive_limit = 12;
};

struct EtaResult {
  double value = 0.0;
  bool infinite = false;   // single vertex: no nonconstant functions
  bool certified = false;  // exact (p = 2 scalar, exhaustive p = 1, or disconnected)
  int iterations = 0;
  std::vector<double> restart_values;
  Eigen::MatrixXd minimizer;  // n x target_dim
};

/// Poincare quotient
///   n * sum_{edges} ||f(x) - f(y)||_p^p / sum_{ordered pairs} ||f(x) - f(y)||_p^p
/// for f given as an n x d matrix. +inf when f is constant.
double poincare_quotient(const Graph& graph, const Eigen::MatrixXd& f, double p);

/// n * cut(A) / (2 |A| (n - |A|)), the p = 1 quotient of the indicator of A.
double set_quotient(const Graph& graph, const std::vector<bool>& in_set);

/// Best Poincare constant found (the infimum of the quotient is bounded from
/// above by the returned value unless `certified`).
EtaResult eta(const Graph& graph, const EtaOptions& options);
inline EtaResult eta(const WarpedGraph& graph, const EtaOptions& options) { return eta(graph.union_graph(), options); }

}  // namespace warpcone
