#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "warpcone/action.hpp"
#include "warpcone/graph.hpp"
#include "warpcone/lanczos.hpp"
#include "warpcone/warp_graph.hpp"

namespace warpcone {

struct EigenEstimate {
  double value = 0.0;
  bool connected = true;  // false: value is 0 by construction, no solve
  int iterations = 0;
  double residual = 0.0;
};

/// Second-smallest eigenvalue of the combinatorial Laplacian.
EigenEstimate lambda2(const Graph& graph, const LanczosOptions& options = {});
/// Union of both edge types, unweighted and simple.
EigenEstimate lambda2(const WarpedGraph& graph, const LanczosOptions& options = {});

/// Discretized action spectral gap: the smallest nonzero generalized
/// eigenvalue of (L_W, L_mu), i.e. the infimum over nonconstant f of
///   sum_s sum_{z,y} w_s(z,y) |f(z)-f(y)|^2 / sum_{z,y} mu_z mu_y |f(z)-f(y)|^2.
/// Zero when the type-1 weights do not connect the vertices.
EigenEstimate kappa_hat(const WarpedGraph& graph, std::span<const double> measures, const LanczosOptions& options = {});

struct MarkovEstimate {
  double norm = 1.0;       // ||M|| on zero-average functions
  double lazy_norm = 1.0;  // ||(I + M) / 2|| on zero-average functions
  double top = 1.0;        // largest eigenvalue on zero-average functions
  double bottom = -1.0;    // smallest eigenvalue on zero-average functions
  double max_mass_deficit = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Markov operator (1/#S) sum_s P_s built from the symmetrized type-1
/// weights, normalized by their row masses (which equal #S mu(U_z) up to
/// sampling loss). Self-adjoint in the weighted inner product, so the norm
/// on zero-average functions is the largest |eigenvalue| after deflation.
MarkovEstimate markov_norm(const WarpedGraph& graph, std::span<const double> measures, double deficit_tol = 1e-2,
                           const LanczosOptions& options = {});

struct FormRatio {
  double ratio = 1.0;
  bool degenerate = false;  // f == 0
};

/// ||g|| / ||f|| for g(z, y) = f(z) - f(y) in L^2(mu x mu; X), X = R^d with
/// the l_q norm (q = infinity allowed). f is #Z x d, rows are values.
FormRatio pairwise_form_ratio(std::span<const double> measures, const Eigen::MatrixXd& f, double q = 2.0);

struct InequalityMargins {
  double forward_bound = 0.0;   // kappa_hat / (2 #S K^3)
  double forward_margin = 0.0;  // eta(2,1) - forward_bound
  double reverse_bound = 0.0;   // eta(2,1) / (2 K^3 D)
  double reverse_margin = 0.0;  // kappa_hat - reverse_bound
};

struct SpectralReport {
  double t = 0.0;
  int n_vertices = 0;
  int num_generators = 0;
  double lambda2 = 0.0;
  struct Eta {
    double p;
    int target_dim;
    double value;
    bool certified;
  };
  std::vector<Eta> eta;
  double kappa_hat = 0.0;
  double markov_norm = 1.0;
  double markov_norm_lazy = 1.0;
  double K_hat = 0.0;
  int D_max = 0;
  double fwd_margin = 0.0;
  // Solver metadata.
  int lambda2_iterations = 0;
  double lambda2_residual = 0.0;
  int kappa_iterations = 0;
  std::uint64_t seed = 0;

  /// Value for (p, target_dim); NaN when not computed.
  double eta_value(double p, int target_dim = 1) const;
};

/// Forward margin eta(2,1) - kappa_hat / (2 #S K^3) and the reverse-direction
/// bound eta / (2 K^3 D). The factor 2 converts the ordered neighbour sum of
/// the inequality chain to the unordered edge sum used for eta.
InequalityMargins inequality_margins(const SpectralReport& report, int num_generators);
inline InequalityMargins inequality_margins(const SpectralReport& report, const Action& action) {
  return inequality_margins(report, action.size());
}

struct SpectrumOptions {
  std::vector<double> p_list{1.0, 2.0, 4.0};
  int target_dim = 1;
  int restarts = 8;
  std::uint64_t seed = 0;
};

/// All level quantities for one graph; K_hat comes from an Ahlfors estimate.
SpectralReport analyze_level(const WarpedGraph& graph, double K_hat, const SpectrumOptions& options);

}  // namespace warpcone
