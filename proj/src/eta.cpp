#include "warpcone/eta.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "warpcone/rng.hpp"
#include "warpcone/types.hpp"

namespace warpcone {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_pow(double x, double e) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::fabs(x), e), x); }

bool even_integer(double p) { return p == std::floor(p) && static_cast<int>(p) % 2 == 0 && p <= 8.0; }

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// sum_{x,y} |v_x - v_y|^p over ordered pairs, with the gradient in v.
double pair_sum(Eigen::VectorXd v, double p, Eigen::VectorXd* grad) {
  const Eigen::Index n = v.size();
  v.array() -= v.mean();
  if (grad) grad->setZero(n);
  if (p == 2.0) {
    const double s2 = v.squaredNorm();
    if (grad) *grad = 4.0 * static_cast<double>(n) * v;
    return 2.0 * static_cast<double>(n) * s2;
  }
  if (p == 1.0) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v(a) < v(b); });
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += v(order[static_cast<std::size_t>(i)]) * static_cast<double>(2 * i - n + 1);
    if (grad) {
      Eigen::Index i = 0;
      while (i < n) {
        Eigen::Index j = i;
        while (j < n && v(order[static_cast<std::size_t>(j)]) == v(order[static_cast<std::size_t>(i)])) ++j;
        const double g = 2.0 * static_cast<double>(i - (n - j));  // #below - #above
        for (Eigen::Index k = i; k < j; ++k) (*grad)(order[static_cast<std::size_t>(k)]) = g;
        i = j;
      }
    }
    return 2.0 * total;
  }
  if (even_integer(p)) {
    const int q = static_cast<int>(p);
    std::vector<double> s(static_cast<std::size_t>(q) + 1, 0.0);
    Eigen::ArrayXd pw = Eigen::ArrayXd::Ones(n);
    for (int j = 0; j <= q; ++j) {
      s[static_cast<std::size_t>(j)] = pw.sum();
      pw *= v.array();
    }
    double total = 0.0;
    for (int j = 0; j <= q; ++j)
      total += binom(q, j) * ((j % 2) ? -1.0 : 1.0) * s[static_cast<std::size_t>(q - j)] * s[static_cast<std::size_t>(j)];
    if (grad) {
      // d/dv_x = 2 p sum_y (v_x - v_y)^(p-1)
      for (int j = 0; j < q; ++j) {
        const double c = binom(q - 1, j) * ((j % 2) ? -1.0 : 1.0) * s[static_cast<std::size_t>(j)];
        grad->array() += 2.0 * p * c * v.array().pow(q - 1 - j);
      }
    }
    return std::max(total, 0.0);
  }
  double total = 0.0;
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = x + 1; y < n; ++y) {
      const double d = v(x) - v(y);
      total += 2.0 * std::pow(std::fabs(d), p);
      if (grad) {
        const double g = 2.0 * p * signed_pow(d, p - 1.0);
        (*grad)(x) += g;
        (*grad)(y) -= g;
      }
    }
  return total;
}

double edge_sum(const Graph& g, const Eigen::VectorXd& v, double p, Eigen::VectorXd* grad) {
  if (grad) grad->setZero(v.size());
  double total = 0.0;
  for (const auto& [a, b] : g.edges()) {
    const double d = v(a) - v(b);
    if (p == 2.0) {
      total += d * d;
    } else {
      total += std::pow(std::fabs(d), p);
    }
    if (grad) {
      const double gr = p == 2.0 ? 2.0 * d : p * signed_pow(d, p - 1.0);
      (*grad)(a) += gr;
      (*grad)(b) -= gr;
    }
  }
  return total;
}

// Quotient and gradient for an n x d matrix.
double quotient(const Graph& g, const Eigen::MatrixXd& f, double p, Eigen::MatrixXd* grad) {
  const auto n = static_cast<double>(g.num_vertices());
  double num = 0.0, den = 0.0;
  Eigen::MatrixXd gn, gd;
  if (grad) {
    gn.resize(f.rows(), f.cols());
    gd.resize(f.rows(), f.cols());
  }
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    Eigen::VectorXd a, b;
    num += edge_sum(g, f.col(c), p, grad ? &a : nullptr);
    den += pair_sum(f.col(c), p, grad ? &b : nullptr);
    if (grad) {
      gn.col(c) = a;
      gd.col(c) = b;
    }
  }
  if (!(den > 0.0)) return kInf;
  if (grad) *grad = n * (gn * den - gd * num) / (den * den);
  return n * num / den;
}

void center_normalize(Eigen::MatrixXd& f) {
  for (Eigen::Index c = 0; c < f.cols(); ++c) f.col(c).array() -= f.col(c).mean();
  const double nrm = f.norm();
  if (nrm > 0.0) f /= nrm;
}

Eigen::MatrixXd random_start(Rng& rng, Eigen::Index n, Eigen::Index d) {
  Eigen::MatrixXd f(n, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index i = 0; i < n; ++i) f(i, c) = rng.normal();
  center_normalize(f);
  return f;
}

struct Descent {
  double value;
  int iterations;
};

// Nonlinear conjugate gradient (Polak-Ribiere+) on the unit sphere of
// zero-mean functions; each step minimizes over the great circle through f
// in the search direction.
Descent conjugate_gradient(const Graph& g, Eigen::MatrixXd& f, double p, int max_iter, double tol) {
  center_normalize(f);
  Eigen::MatrixXd grad;
  double q = quotient(g, f, p, &grad);
  if (!std::isfinite(q)) return {q, 0};
  Eigen::MatrixXd dir = -grad, prev_grad = grad;
  double step = 0.1;
  int stall = 0, it = 0;
  for (; it < max_iter; ++it) {
    Eigen::MatrixXd d = dir - (dir.cwiseProduct(f).sum()) * f;
    for (Eigen::Index c = 0; c < d.cols(); ++c) d.col(c).array() -= d.col(c).mean();
    if (d.cwiseProduct(grad).sum() >= 0.0) {
      d = -grad - (-grad.cwiseProduct(f).sum()) * f;
      dir = -grad;
    }
    const double dn = d.norm();
    if (!(dn > 1e-300)) break;
    d /= dn;

    auto phi = [&](double th) {
      Eigen::MatrixXd x = std::cos(th) * f + std::sin(th) * d;
      return quotient(g, x, p, nullptr);
    };
    double lo = 0.0, hi = 0.0;
    double th = std::min(step, 1.5);
    double fth = phi(th);
    if (fth < q) {
      while (2.0 * th < 1.5) {
        const double f2 = phi(2.0 * th);
        if (f2 >= fth) break;
        th *= 2.0;
        fth = f2;
      }
      hi = std::min(2.0 * th, 1.5);
    } else {
      while (th > 1e-14 && fth >= q) {
        th *= 0.5;
        fth = phi(th);
      }
      if (fth >= q) break;
      hi = 2.0 * th;
    }
    std::uintmax_t brent_iter = 60;
    auto best = boost::math::tools::brent_find_minima(phi, lo, hi, 40, brent_iter);
    if (best.second > fth) best = {th, fth};
    step = std::max(best.first, 1e-12);

    f = std::cos(best.first) * f + std::sin(best.first) * d;
    center_normalize(f);
    const double q_new = quotient(g, f, p, &grad);
    const double decrease = q - q_new;
    q = q_new;
    if (decrease <= tol * std::max(1.0, std::fabs(q))) {
      if (++stall >= 5) break;
    } else {
      stall = 0;
    }
    const double denom = prev_grad.squaredNorm();
    const double beta = denom > 0.0 ? std::max(0.0, grad.cwiseProduct(grad - prev_grad).sum() / denom) : 0.0;
    dir = -grad + beta * dir;
    prev_grad = grad;
  }
  return {q, it};
}

// Smallest Laplacian eigenpair on the zero-mean subspace by block-free
// LOBPCG (Rayleigh-Ritz on span{x, r, p}). Returns the Rayleigh quotient.
Descent lobpcg_fiedler(const Eigen::SparseMatrix<double>& lap, Eigen::VectorXd& x, int max_iter, double tol) {
  const Eigen::Index n = x.size();
  auto clean = [n](Eigen::VectorXd& v) { v.array() -= v.sum() / static_cast<double>(n); };
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, 2.0 * lap.coeff(i, i));
  scale = std::max(scale, 1.0);

  clean(x);
  x.normalize();
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd lx = lap * x;
  double theta = x.dot(lx);
  int it = 0;
  for (; it < max_iter; ++it) {
    Eigen::VectorXd r = lx - theta * x;
    clean(r);
    if (r.norm() <= tol * scale) break;

    std::vector<Eigen::VectorXd> basis{x};
    for (Eigen::VectorXd v : {r, prev}) {
      for (int pass = 0; pass < 2; ++pass) {
        clean(v);
        for (const auto& b : basis) v -= b.dot(v) * b;
      }
      const double nv = v.norm();
      if (nv > 1e-12) basis.push_back(v / nv);
    }
    const auto k = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd v(n, k);
    for (Eigen::Index j = 0; j < k; ++j) v.col(j) = basis[static_cast<std::size_t>(j)];
    const Eigen::MatrixXd lv = lap * v;
    Eigen::MatrixXd small = v.transpose() * lv;
    small = 0.5 * (small + small.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
    const Eigen::VectorXd c = es.eigenvectors().col(0);
    Eigen::VectorXd xn = v * c;
    prev = xn - c(0) * x;
    const double nx = xn.norm();
    x = xn / nx;
    lx = lv * c / nx;
    theta = x.dot(lx);
    if (it % 50 == 49) lx = lap * x;  // refresh to limit drift
  }
  lx = lap * x;
  return {x.dot(lx), it};
}

EtaResult exhaustive_p1(const Graph& g) {
  const int n = g.num_vertices();
  EtaResult out;
  out.value = kInf;
  std::vector<bool> best;
  // Vertex n-1 stays outside: A and its complement give the same quotient.
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  std::vector<bool> in(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    for (int i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = (mask >> i) & 1U;
    const double q = set_quotient(g, in);
    if (q < out.value) {
      out.value = q;
      best = in;
    }
  }
  out.minimizer.resize(n, 1);
  for (int i = 0; i < n; ++i) out.minimizer(i, 0) = best[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  out.certified = true;
  return out;
}

// Best level set of v, improved by single-vertex moves.
double sweep_and_polish(const Graph& g, const Eigen::VectorXd& v, std::vector<bool>& best_set) {
  const int n = g.num_vertices();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return v(a) < v(b); });

  std::vector<bool> in(static_cast<std::size_t>(n), false);
  double cut = 0.0, best = kInf;
  int best_k = 0;
  for (int k = 0; k + 1 < n; ++k) {
    const int u = order[static_cast<std::size_t>(k)];
    for (int w : g.neighbors(u)) cut += in[static_cast<std::size_t>(w)] ? -1.0 : 1.0;
    in[static_cast<std::size_t>(u)] = true;
    const double a = k + 1;
    const double q = n * cut / (2.0 * a * (n - a));
    if (q < best) {
      best = q;
      best_k = k;
    }
  }
  std::vector<bool> set(static_cast<std::size_t>(n), false);
  for (int k = 0; k <= best_k; ++k) set[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;

  // Local search: move one vertex across if it lowers the quotient.
  int size = best_k + 1;
  double cut_val = 0.0;
  for (const auto& [a, b] : g.edges()) cut_val += set[static_cast<std::size_t>(a)] != set[static_cast<std::size_t>(b)] ? 1.0 : 0.0;
  bool improved = true;
  for (int pass = 0; improved && pass < 100; ++pass) {
    improved = false;
    for (int u = 0; u < n; ++u) {
      const bool inside = set[static_cast<std::size_t>(u)];
      const int new_size = size + (inside ? -1 : 1);
      if (new_size <= 0 || new_size >= n) continue;
      double same = 0.0, other = 0.0;
      for (int w : g.neighbors(u)) (set[static_cast<std::size_t>(w)] == inside ? same : other) += 1.0;
      const double new_cut = cut_val + same - other;
      const double q = n * new_cut / (2.0 * new_size * static_cast<double>(n - new_size));
      if (q < best - 1e-15 * std::max(1.0, best)) {
        best = q;
        cut_val = new_cut;
        size = new_size;
        set[static_cast<std::size_t>(u)] = !inside;
        improved = true;
      }
    }
  }
  best_set = std::move(set);
  return best;
}

Eigen::MatrixXd indicator(const std::vector<bool>& s) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(s.size()), 1);
  for (std::size_t i = 0; i < s.size(); ++i) f(static_cast<Eigen::Index>(i), 0) = s[i] ? 1.0 : 0.0;
  return f;
}

EtaResult scalar_p2(const Graph& g, const EtaOptions& o) {
  const Eigen::SparseMatrix<double> lap = g.laplacian();
  Rng rng(substream(o.seed, "optimizer", 2));
  EtaResult out;
  out.value = kInf;
  const int budget = std::max(20 * g.num_vertices(), 5000);
  for (int r = 0; r < std::max(1, o.restarts); ++r) {
    Eigen::VectorXd x(g.num_vertices());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.normal();
    const Descent d = lobpcg_fiedler(lap, x, budget, std::min(o.tol, 1e-10));
    const double val = d.value / 2.0;
    out.restart_values.push_back(val);
    out.iterations += d.iterations;
    if (val < out.value) {
      out.value = val;
      out.minimizer = x;
    }
  }
  out.certified = true;
  return out;
}

EtaResult scalar_p1(const Graph& g, const EtaOptions& o, const Eigen::MatrixXd* warm) {
  EtaResult out;
  out.value = kInf;
  std::vector<bool> set;
  auto consider = [&](const Eigen::VectorXd& v) {
    const double q = sweep_and_polish(g, v, set);
    out.restart_values.push_back(q);
    if (q < out.value) {
      out.value = q;
      out.minimizer = indicator(set);
    }
  };
  if (warm) consider(warm->col(0));
  Rng rng(substream(o.seed, "optimizer", 1));
  for (int r = 0; r < o.restarts; ++r) {
    Eigen::MatrixXd f = random_start(rng, g.num_vertices(), 1);
    const Descent d = conjugate_gradient(g, f, 1.0, o.max_iter, o.tol);
    out.iterations += d.iterations;
    consider(f.col(0));
  }
  return out;
}

EtaResult generic(const Graph& g, const EtaOptions& o, const Eigen::MatrixXd* warm) {
  EtaResult out;
  out.value = kInf;
  auto run = [&](Eigen::MatrixXd f) {
    const Descent d = conjugate_gradient(g, f, o.p, o.max_iter, o.tol);
    out.iterations += d.iterations;
    out.restart_values.push_back(d.value);
    if (d.value < out.value) {
      out.value = d.value;
      out.minimizer = f;
    }
  };
  if (warm) run(*warm);
  Rng rng(substream(o.seed, "optimizer", static_cast<std::uint64_t>(o.target_dim)));
  for (int r = 0; r < o.restarts; ++r) run(random_start(rng, g.num_vertices(), o.target_dim));
  return out;
}

}  // namespace

double poincare_quotient(const Graph& graph, const Eigen::MatrixXd& f, double p) {
  if (f.rows() != graph.num_vertices()) throw InputError("function size does not match graph");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("exponent p must lie in [1, inf)");
  return quotient(graph, f, p, nullptr);
}

double set_quotient(const Graph& graph, const std::vector<bool>& in_set) {
  const int n = graph.num_vertices();
  if (in_set.size() != static_cast<std::size_t>(n)) throw InputError("set size does not match graph");
  const auto a = static_cast<double>(std::count(in_set.begin(), in_set.end(), true));
  if (a == 0.0 || a == n) return kInf;
  double cut = 0.0;
  for (const auto& [u, v] : graph.edges()) cut += in_set[static_cast<std::size_t>(u)] != in_set[static_cast<std::size_t>(v)] ? 1.0 : 0.0;
  return n * cut / (2.0 * a * (n - a));
}

EtaResult eta(const Graph& graph, const EtaOptions& options) {
  if (!(options.p >= 1.0) || !std::isfinite(options.p)) throw InputError("exponent p must lie in [1, inf)");
  if (options.target_dim < 1) throw InputError("target dimension must be >= 1");
  if (options.restarts < 0) throw InputError("restarts must be >= 0");
  const int n = graph.num_vertices();
  if (n == 0) throw InputError("empty graph");
  EtaResult out;
  if (n == 1) {
    out.value = kInf;
    out.infinite = true;
    out.certified = true;
    return out;
  }
  if (!graph.connected()) {
    // Constant on each component.
    out.certified = true;
    const auto dist = graph.bfs(0);
    out.minimizer.resize(n, options.target_dim);
    out.minimizer.setZero();
    for (int i = 0; i < n; ++i) out.minimizer(i, 0) = dist[static_cast<std::size_t>(i)] >= 0 ? 1.0 : 0.0;
    return out;
  }

  const bool exhaustive = options.p == 1.0 && n <= options.exhaustive_limit;
  if (options.target_dim == 1) {
    if (options.p == 2.0) return scalar_p2(graph, options);
    if (exhaustive) return exhaustive_p1(graph);
    std::optional<Eigen::MatrixXd> warm;
    if (options.spectral_warm_start) {
      EtaOptions w = options;
      w.p = 2.0;
      w.restarts = 1;
      warm = scalar_p2(graph, w).minimizer;
    }
    if (options.p == 1.0) return scalar_p1(graph, options, warm ? &*warm : nullptr);
    return generic(graph, options, warm ? &*warm : nullptr);
  }

  // Vector targets: the scalar optimum embedded in the first coordinate is
  // an admissible start; the search can only go lower from there.
  EtaOptions scalar = options;
  scalar.target_dim = 1;
  const EtaResult first = eta(graph, scalar);
  Eigen::MatrixXd warm = Eigen::MatrixXd::Zero(n, options.target_dim);
  warm.col(0) = first.minimizer.col(0);
  EtaResult vec = generic(graph, options, &warm);
  if (first.value <= vec.value) {
    vec.value = first.value;
    vec.minimizer = warm;
  }
  // l_p^d sums coordinatewise, so the vector constant equals the scalar one;
  // exactness carries over.
  vec.certified = first.certified;
  vec.iterations += first.iterations;
  return vec;
}

}  // namespace warpcone
