#include "warpcone/lanczos.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "warpcone/rng.hpp"
#include "warpcone/types.hpp"

namespace warpcone {
namespace {

void project_out(Eigen::VectorXd& v, const Eigen::MatrixXd& basis) {
  if (basis.cols() == 0) return;
  v -= basis * (basis.transpose() * v);
}

}  // namespace

LanczosResult lanczos(const LinearOperator& op, Eigen::Index n, const Eigen::MatrixXd& deflate, LanczosTarget target,
                      const LanczosOptions& options) {
  LanczosResult result;
  const Eigen::Index space_dim = n - deflate.cols();
  if (space_dim <= 0) {
    result.converged = true;
    return result;
  }
  const int budget = static_cast<int>(std::min<Eigen::Index>(options.max_iter, space_dim));

  Rng rng(options.seed);
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = rng.normal();
  project_out(q, deflate);
  project_out(q, deflate);
  q.normalize();

  std::vector<Eigen::VectorXd> basis;
  basis.reserve(static_cast<std::size_t>(budget) + 1);
  basis.push_back(q);
  std::vector<double> alpha, beta;
  Eigen::VectorXd w(n);
  double last_residual = 0.0;

  for (int j = 0; j < budget; ++j) {
    op(basis.back(), w);
    if (j > 0) w -= beta.back() * basis[basis.size() - 2];
    const double a = basis.back().dot(w);
    alpha.push_back(a);
    w -= a * basis.back();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : basis) w -= v.dot(w) * v;
      project_out(w, deflate);
    }
    const double b = w.norm();

    const int m = static_cast<int>(alpha.size());
    const bool last = (j + 1 == budget);
    const bool check = last || m <= 10 || m % 5 == 0;
    double scale = 0.0;
    for (double x : alpha) scale = std::max(scale, std::fabs(x));
    for (double x : beta) scale = std::max(scale, std::fabs(x));
    scale = std::max({scale, b, 1e-300});
    const bool breakdown = b <= 1e-13 * scale;

    if (check || breakdown) {
      Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1)) : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
      const auto& vals = tri.eigenvalues();
      const auto& vecs = tri.eigenvectors();
      result.lowest = vals(0);
      result.highest = vals(m - 1);
      result.residual_lowest = breakdown ? 0.0 : std::fabs(b * vecs(m - 1, 0));
      result.residual_highest = breakdown ? 0.0 : std::fabs(b * vecs(m - 1, m - 1));
      result.iterations = m;
      const double spectral_scale = std::max(std::fabs(vals(0)), std::fabs(vals(m - 1)));
      const double limit = options.tol * std::max(spectral_scale, 1e-300);
      last_residual = target == LanczosTarget::kHighest ? result.residual_highest
                                                        : std::max(result.residual_lowest, result.residual_highest);
      // Exhausting the whole complement makes the Ritz values exact.
      if (breakdown || last_residual <= limit || m == space_dim) {
        result.converged = true;
        return result;
      }
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  throw SolverError("Lanczos did not converge within " + std::to_string(budget) + " iterations", last_residual);
}

LanczosResult smallest_nonnull_eigenvalue(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& null_vector,
                                          const LanczosOptions& options) {
  const Eigen::Index n = matrix.rows();
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) max_diag = std::max(max_diag, matrix.coeff(i, i));
  const double shift = 1e-6 * std::max(1.0, max_diag);

  Eigen::SparseMatrix<double> shifted = matrix;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
  if (factor.info() != Eigen::Success) throw SolverError("sparse factorization failed", 0.0);

  Eigen::MatrixXd deflate = null_vector.normalized();
  LinearOperator inverse = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out = factor.solve(in); };
  LanczosResult r = lanczos(inverse, n, deflate, LanczosTarget::kHighest, options);
  // theta = 1 / (lambda + shift)
  LanczosResult out = r;
  out.lowest = 1.0 / r.highest - shift;
  out.residual_lowest = r.residual_highest / (r.highest * r.highest);
  out.highest = 1.0 / r.lowest - shift;
  return out;
}

}  // namespace warpcone
