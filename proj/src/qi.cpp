#include "warpcone/qi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "warpcone/rng.hpp"
#include "warpcone/types.hpp"

namespace warpcone {

double ball_size(int D, double r) {
  if (D < 0 || !(r >= 0.0)) throw InputError("ball_size needs D >= 0 and r >= 0");
  const double R = std::ceil(r);
  if (R == 0.0 || D == 0) return 1.0;
  if (D == 1) return 2.0;
  if (D == 2) return 1.0 + 2.0 * R;
  return 1.0 + D * (std::pow(D - 1.0, R) - 1.0) / (D - 2.0);
}

double transfer_bound(double eta_G, const QIParams& params) {
  if (!(eta_G > 0.0)) throw InputError("transfer_bound needs eta_G > 0");
  if (!(params.C >= 1.0) || !(params.A >= 0.0) || !(params.B >= 0.0) || params.D < 0)
    throw InputError("invalid quasi-isometry parameters");
  const double ka = ball_size(params.D, params.A);
  const double kb = ball_size(params.D, params.B);
  const double kca = ball_size(params.D, params.C + params.A);
  const double first = std::isinf(eta_G) ? 0.0 : ka * ka * ka * kb * kb * kca * kca / eta_G;
  return 1.0 / (first + 2.0 * kb * kb);
}

Subdivision subdivide(const Graph& graph, int k) {
  if (k < 1) throw InputError("subdivision parameter k must be >= 1");
  const int n = graph.num_vertices();
  std::vector<Edge> edges;
  edges.reserve(graph.num_edges() * static_cast<std::size_t>(k + 1));
  int next = n;
  for (const auto& [a, b] : graph.edges()) {
    int prev = a;
    for (int j = 0; j < k; ++j) {
      edges.emplace_back(prev, next);
      prev = next++;
    }
    edges.emplace_back(prev, b);
  }
  Subdivision out;
  out.graph = Graph(next, std::move(edges));
  out.params.C = k + 1.0;
  out.params.A = 0.0;
  out.params.B = std::ceil(k / 2.0);
  out.params.D = std::max(graph.max_degree(), 2);
  return out;
}

QIPairCheck check_subdivision_qi(const Graph& original, const Subdivision& sub, int n_pairs, std::uint64_t seed) {
  QIPairCheck r;
  r.n_pairs = n_pairs;
  const int n = original.num_vertices();
  const QIParams& q = sub.params;
  Rng rng(substream(seed, "qi-pairs"));
  for (int i = 0; i < n_pairs && n > 0; ++i) {
    const auto x = static_cast<VertexId>(rng.below(static_cast<std::uint64_t>(n)));
    const auto y = static_cast<VertexId>(rng.below(static_cast<std::uint64_t>(n)));
    const int dg = original.bfs(x)[static_cast<std::size_t>(y)];
    const int dh = sub.graph.bfs(x)[static_cast<std::size_t>(y)];
    if ((dg < 0) != (dh < 0)) {
      ++r.violations;
      continue;
    }
    if (dg < 0) continue;
    if (dg / q.C - q.A > dh + 1e-12 || dh > q.C * dg + q.A + 1e-12) ++r.violations;
  }

  // Multi-source BFS from the image.
  const int m = sub.graph.num_vertices();
  std::vector<int> dist(static_cast<std::size_t>(m), -1);
  std::queue<int> frontier;
  for (int v = 0; v < n; ++v) {
    dist[static_cast<std::size_t>(v)] = 0;
    frontier.push(v);
  }
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int w : sub.graph.neighbors(u))
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        frontier.push(w);
      }
  }
  for (int d : dist) {
    if (d < 0) {
      ++r.violations;
      continue;
    }
    r.codensity_radius = std::max(r.codensity_radius, d);
  }
  if (r.codensity_radius > q.B) ++r.violations;
  return r;
}

QIReport qi_invariance_check(const std::vector<Graph>& family, int k, const EtaOptions& options) {
  if (family.empty()) throw InputError("empty graph family");
  QIReport rep;
  EtaOptions eo = options;
  eo.p = 1.0;
  eo.target_dim = 1;

  std::vector<Subdivision> subs;
  int degree = 2;
  rep.min_eta_G = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < family.size(); ++i) {
    subs.push_back(subdivide(family[i], k));
    degree = std::max(degree, subs.back().params.D);
    QIMember m;
    m.n_vertices = family[i].num_vertices();
    m.n_vertices_subdivided = subs.back().graph.num_vertices();
    eo.seed = substream(options.seed, "qi-eta-g", i);
    const EtaResult eg = eta(family[i], eo);
    m.eta_G = eg.value;
    m.eta_G_certified = eg.certified;
    eo.seed = substream(options.seed, "qi-eta-h", i);
    const EtaResult eh = eta(subs.back().graph, eo);
    m.eta_H = eh.value;
    m.eta_H_certified = eh.certified;
    m.qi_violations = check_subdivision_qi(family[i], subs.back(), 64, substream(options.seed, "qi-check", i)).violations;
    rep.min_eta_G = std::min(rep.min_eta_G, m.eta_G);
    rep.members.push_back(m);
  }
  rep.params = subs.front().params;
  rep.params.D = degree;

  rep.precondition_met = rep.min_eta_G > 0.0;
  const double bound = rep.precondition_met ? transfer_bound(rep.min_eta_G, rep.params) : 0.0;
  for (auto& m : rep.members) {
    m.bound = bound;
    m.margin = m.eta_H - bound;
    if (m.margin < 0.0) ++rep.violations;
    rep.violations += m.qi_violations;
  }
  if (!rep.precondition_met) ++rep.violations;
  return rep;
}

}  // namespace warpcone
