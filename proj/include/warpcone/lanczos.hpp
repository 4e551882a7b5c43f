#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>

namespace warpcone {

using LinearOperator = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct LanczosOptions {
  int max_iter = 2000;
  /// Converged when every requested Ritz residual is <= tol * spectral scale.
  double tol = 1e-12;
  std::uint64_t seed = 1;
};

enum class LanczosTarget { kHighest, kBothEnds };

struct LanczosResult {
  double lowest = 0.0;
  double highest = 0.0;
  double residual_lowest = 0.0;
  double residual_highest = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Extreme eigenvalues of a symmetric operator restricted to the orthogonal
/// complement of `deflate` (orthonormal columns, may be empty). Full
/// reorthogonalization; throws SolverError when the budget runs out.
LanczosResult lanczos(const LinearOperator& op, Eigen::Index n, const Eigen::MatrixXd& deflate, LanczosTarget target,
                      const LanczosOptions& options = {});

/// Smallest eigenvalue of a symmetric positive semidefinite sparse matrix on
/// the complement of a known unit null vector, via shift-invert Lanczos.
LanczosResult smallest_nonnull_eigenvalue(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& null_vector,
                                          const LanczosOptions& options = {});

}  // namespace warpcone
