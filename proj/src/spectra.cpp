#include "warpcone/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "warpcone/eta.hpp"

namespace warpcone {

EigenEstimate lambda2(const Graph& graph, const LanczosOptions& options) {
  EigenEstimate out;
  const int n = graph.num_vertices();
  if (n <= 1) return out;
  if (!graph.connected()) {
    out.connected = false;
    return out;
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  const LanczosResult r = smallest_nonnull_eigenvalue(graph.laplacian(), ones, options);
  out.value = std::max(0.0, r.lowest);
  out.iterations = r.iterations;
  out.residual = r.residual_lowest;
  return out;
}

EigenEstimate lambda2(const WarpedGraph& graph, const LanczosOptions& options) { return lambda2(graph.union_graph(), options); }

EigenEstimate kappa_hat(const WarpedGraph& graph, std::span<const double> measures, const LanczosOptions& options) {
  const int n = graph.num_vertices();
  if (measures.size() != static_cast<std::size_t>(n)) throw InputError("measure count does not match vertex count");
  for (double m : measures)
    if (!(m > 0.0)) throw InputError("cell measures must be positive");
  EigenEstimate out;
  if (n == 1) {
    out.value = std::numeric_limits<double>::infinity();  // no nonconstant functions
    return out;
  }

  const Eigen::SparseMatrix<double> w = graph.symmetrized_weights();
  std::vector<Edge> support;
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < w.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(w, k); it; ++it) {
      const auto z = static_cast<int>(it.row()), y = static_cast<int>(it.col());
      if (z == y || it.value() <= 0.0) continue;
      if (z < y) support.emplace_back(z, y);
      degree[static_cast<std::size_t>(z)] += it.value();
      const double scale = 1.0 / std::sqrt(measures[static_cast<std::size_t>(z)] * measures[static_cast<std::size_t>(y)]);
      trip.emplace_back(z, y, -it.value() * scale);
    }
  if (count_components(n, support) != 1) {
    out.connected = false;
    return out;
  }
  for (int z = 0; z < n; ++z) trip.emplace_back(z, z, degree[static_cast<std::size_t>(z)] / measures[static_cast<std::size_t>(z)]);
  Eigen::SparseMatrix<double> normalized(n, n);
  normalized.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd root(n);
  for (int z = 0; z < n; ++z) root(z) = std::sqrt(measures[static_cast<std::size_t>(z)]);
  const LanczosResult r = smallest_nonnull_eigenvalue(normalized, root, options);
  out.value = std::max(0.0, r.lowest);
  out.iterations = r.iterations;
  out.residual = r.residual_lowest;
  return out;
}

MarkovEstimate markov_norm(const WarpedGraph& graph, std::span<const double> measures, double deficit_tol,
                           const LanczosOptions& options) {
  const int n = graph.num_vertices();
  if (measures.size() != static_cast<std::size_t>(n)) throw InputError("measure count does not match vertex count");
  const int ns = graph.num_generators();
  MarkovEstimate out;
  if (n == 1) {
    out.norm = out.lazy_norm = out.top = out.bottom = 0.0;
    return out;
  }

  Eigen::SparseMatrix<double> w = graph.symmetrized_weights();
  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < w.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(w, k); it; ++it) degree[static_cast<std::size_t>(it.row())] += it.value();

  int empty_rows = 0;
  for (int z = 0; z < n; ++z) {
    auto& d = degree[static_cast<std::size_t>(z)];
    const double expected = ns * measures[static_cast<std::size_t>(z)];
    if (d <= 0.0) {
      // A row that lost all its mass stays put.
      w.coeffRef(z, z) += expected;
      d = expected;
      ++empty_rows;
    }
    out.max_mass_deficit = std::max(out.max_mass_deficit, std::fabs(d / expected - 1.0));
  }
  if (empty_rows > 0) out.warnings.push_back(std::to_string(empty_rows) + " empty row(s) replaced by self-loops");
  if (out.max_mass_deficit > deficit_tol)
    out.warnings.push_back("row-mass deficit " + std::to_string(out.max_mass_deficit) + " exceeds tolerance; rows renormalized");

  Eigen::VectorXd inv_root(n), root(n);
  for (int z = 0; z < n; ++z) {
    root(z) = std::sqrt(degree[static_cast<std::size_t>(z)]);
    inv_root(z) = 1.0 / root(z);
  }
  const Eigen::SparseMatrix<double> sym = inv_root.asDiagonal() * w * inv_root.asDiagonal();
  const Eigen::MatrixXd deflate = root.normalized();
  LinearOperator op = [&](const Eigen::VectorXd& in, Eigen::VectorXd& res) { res = sym * in; };
  LanczosOptions opts = options;
  opts.tol = std::max(options.tol, 1e-10);
  const LanczosResult r = lanczos(op, n, deflate, LanczosTarget::kBothEnds, opts);
  out.top = std::clamp(r.highest, -1.0, 1.0);
  out.bottom = std::clamp(r.lowest, -1.0, 1.0);
  out.norm = std::max(std::fabs(out.top), std::fabs(out.bottom));
  out.lazy_norm = (1.0 + out.top) / 2.0;
  out.iterations = r.iterations;
  return out;
}

FormRatio pairwise_form_ratio(std::span<const double> measures, const Eigen::MatrixXd& f, double q) {
  const auto n = static_cast<Eigen::Index>(measures.size());
  if (f.rows() != n) throw InputError("function and measure sizes differ");
  if (!(q >= 1.0)) throw InputError("norm exponent must be >= 1");
  auto norm = [q](const Eigen::RowVectorXd& v) {
    if (std::isinf(q)) return v.cwiseAbs().maxCoeff();
    if (q == 2.0) return v.norm();
    return std::pow(v.cwiseAbs().array().pow(q).sum(), 1.0 / q);
  };

  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(f.cols());
  double scale = 0.0;
  for (Eigen::Index z = 0; z < n; ++z) {
    mean += measures[static_cast<std::size_t>(z)] * f.row(z);
    scale += measures[static_cast<std::size_t>(z)] * f.row(z).cwiseAbs().maxCoeff();
  }
  if (mean.cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, scale)) throw InputError("function must have zero average");

  double ff = 0.0, gg = 0.0;
  for (Eigen::Index z = 0; z < n; ++z) {
    const double nz = norm(f.row(z));
    ff += measures[static_cast<std::size_t>(z)] * nz * nz;
    for (Eigen::Index y = 0; y < n; ++y) {
      const double d = norm(f.row(z) - f.row(y));
      gg += measures[static_cast<std::size_t>(z)] * measures[static_cast<std::size_t>(y)] * d * d;
    }
  }
  FormRatio out;
  if (ff == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.ratio = std::sqrt(gg / ff);
  return out;
}

double SpectralReport::eta_value(double p, int target_dim) const {
  for (const auto& e : eta)
    if (e.p == p && e.target_dim == target_dim) return e.value;
  return std::numeric_limits<double>::quiet_NaN();
}

InequalityMargins inequality_margins(const SpectralReport& report, int num_generators) {
  const double eta2 = report.eta_value(2.0, 1);
  if (std::isnan(eta2)) throw InputError("report lacks eta(2,1)");
  if (!(report.K_hat > 0.0) || num_generators < 1) throw InputError("report lacks K_hat or generator count");
  InequalityMargins m;
  const double k3 = report.K_hat * report.K_hat * report.K_hat;
  m.forward_bound = report.kappa_hat / (2.0 * num_generators * k3);
  m.forward_margin = eta2 - m.forward_bound;
  if (report.D_max > 0) {
    m.reverse_bound = eta2 / (2.0 * k3 * report.D_max);
    m.reverse_margin = report.kappa_hat - m.reverse_bound;
  }
  return m;
}

SpectralReport analyze_level(const WarpedGraph& graph, double K_hat, const SpectrumOptions& options) {
  SpectralReport r;
  r.t = graph.t();
  r.n_vertices = graph.num_vertices();
  r.num_generators = graph.num_generators();
  r.K_hat = K_hat;
  r.seed = options.seed;

  const Graph g = graph.union_graph();
  LanczosOptions lopts;
  lopts.seed = substream(options.seed, "lanczos");
  const EigenEstimate l2 = lambda2(g, lopts);
  r.lambda2 = l2.value;
  r.lambda2_iterations = l2.iterations;
  r.lambda2_residual = l2.residual;

  std::vector<double> ps = options.p_list;
  if (std::find(ps.begin(), ps.end(), 2.0) == ps.end()) ps.push_back(2.0);
  for (double p : ps) {
    EtaOptions eo;
    eo.p = p;
    eo.target_dim = 1;
    eo.restarts = options.restarts;
    eo.seed = substream(options.seed, "optimizer", static_cast<std::uint64_t>(p * 1000));
    const EtaResult e = eta(g, eo);
    r.eta.push_back({p, 1, e.value, e.certified});
    if (options.target_dim > 1) {
      eo.target_dim = options.target_dim;
      const EtaResult ed = eta(g, eo);
      r.eta.push_back({p, options.target_dim, ed.value, ed.certified});
    }
  }

  const auto& mu = graph.cell_measures();
  const EigenEstimate k = kappa_hat(graph, mu, lopts);
  r.kappa_hat = k.value;
  r.kappa_iterations = k.iterations;
  const MarkovEstimate mk = markov_norm(graph, mu, 1e-2, lopts);
  r.markov_norm = mk.norm;
  r.markov_norm_lazy = mk.lazy_norm;
  r.D_max = g.max_degree();
  r.fwd_margin = inequality_margins(r, r.num_generators).forward_margin;
  return r;
}

}  // namespace warpcone
