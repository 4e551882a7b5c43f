#include "warpcone/warp_graph.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <tuple>

namespace warpcone {

std::string to_string(Variant v) { return v == Variant::kFull ? "full" : "type1_only"; }

Variant parse_variant(const std::string& s) {
  if (s == "full") return Variant::kFull;
  if (s == "type1_only" || s == "type1") return Variant::kType1Only;
  throw InputError("unknown graph variant '" + s + "'");
}

WarpedGraph::WarpedGraph(double t, int n, Variant variant, std::vector<int> generator_inverse, std::vector<WeightedArc> arcs,
                         std::vector<Edge> type2, std::vector<double> cell_measures)
    : t_(t),
      n_(n),
      variant_(variant),
      inverse_(std::move(generator_inverse)),
      arcs_(std::move(arcs)),
      type2_(std::move(type2)),
      measures_(std::move(cell_measures)) {
  if (measures_.size() != static_cast<std::size_t>(n_)) throw InputError("cell measure count does not match vertex count");
  for (const auto& a : arcs_)
    if (a.src < 0 || a.dst < 0 || a.src >= n_ || a.dst >= n_ || a.gen < 0 || a.gen >= num_generators())
      throw InputError("arc out of range");
  std::sort(arcs_.begin(), arcs_.end(), [](const WeightedArc& a, const WeightedArc& b) {
    return std::tie(a.gen, a.src, a.dst) < std::tie(b.gen, b.src, b.dst);
  });
  for (auto& e : type2_)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(type2_.begin(), type2_.end());
  type2_.erase(std::unique(type2_.begin(), type2_.end()), type2_.end());
  if (variant_ == Variant::kType1Only) type2_.clear();
}

Graph WarpedGraph::type1_graph() const {
  std::vector<Edge> e;
  for (const auto& a : arcs_)
    if (a.src != a.dst && a.weight > 0.0) e.emplace_back(a.src, a.dst);
  return Graph(n_, std::move(e));
}

Graph WarpedGraph::type2_graph() const { return Graph(n_, type2_); }

Graph WarpedGraph::union_graph() const {
  std::vector<Edge> e = type2_;
  for (const auto& a : arcs_)
    if (a.src != a.dst && a.weight > 0.0) e.emplace_back(a.src, a.dst);
  return Graph(n_, std::move(e));
}

Eigen::SparseMatrix<double> WarpedGraph::symmetrized_weights() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(arcs_.size());
  for (const auto& a : arcs_) trip.emplace_back(a.src, a.dst, a.weight);
  Eigen::SparseMatrix<double> total(n_, n_);
  total.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> transposed = total.transpose();
  Eigen::SparseMatrix<double> w = 0.5 * (total + transposed);
  w.makeCompressed();
  return w;
}

std::vector<double> WarpedGraph::row_mass(int gen) const {
  std::vector<double> mass(static_cast<std::size_t>(n_), 0.0);
  for (const auto& a : arcs_)
    if (a.gen == gen) mass[static_cast<std::size_t>(a.src)] += a.weight;
  return mass;
}

namespace {

struct CellResult {
  std::vector<WeightedArc> arcs;
  int accepted = 0;
};

CellResult sample_cell(const Net& net, const Action& action, VertexId z, double mass, std::uint64_t seed,
                       const GraphBuildOptions& options) {
  const Space& space = net.space();
  const int d = space.dim();
  const double half = 1.0 / net.t();
  const bool whole_space = half >= 0.5;
  Rng rng(substream(seed, "cells", static_cast<std::uint64_t>(z)));
  const Point& center = net.point(z);

  std::vector<std::pair<int, VertexId>> hits;  // (generator, owner of s u)
  hits.reserve(static_cast<std::size_t>(options.n_per_cell * action.size()));
  int accepted = 0;
  const std::int64_t budget = static_cast<std::int64_t>(options.attempt_factor) * options.n_per_cell;
  for (std::int64_t attempt = 0; attempt < budget && accepted < options.n_per_cell; ++attempt) {
    Point u(d);
    if (whole_space) {
      u = space.sample(rng);
    } else {
      for (int i = 0; i < d; ++i) u[i] = center[i] + rng.uniform(-half, half);
      u = space.wrap(u);
    }
    if (net.assign_cell(u) != z) continue;
    ++accepted;
    for (int s = 0; s < action.size(); ++s) hits.emplace_back(s, net.assign_cell(action.apply(s, u)));
  }
  CellResult out;
  out.accepted = accepted;
  if (accepted == 0) return out;
  std::sort(hits.begin(), hits.end());
  const double unit = mass / accepted;
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    out.arcs.push_back({z, hits[i].second, hits[i].first, unit * static_cast<double>(j - i)});
    i = j;
  }
  return out;
}

}  // namespace

WarpedGraph build_graph(const Net& net, const Action& action, std::uint64_t seed, const GraphBuildOptions& options) {
  if (options.n_per_cell < 30) throw InputError("n_per_cell must be >= 30");
  if (!net.has_measures()) throw InputError("build_graph needs cell measures on the net");
  if (net.space().dim() != action.space().dim() || net.space().name() != action.space().name())
    throw InputError("net and action live on different spaces");

  const int n = net.size();
  std::vector<CellResult> cells(static_cast<std::size_t>(n));
  const auto measures = net.cell_measures();
  auto run = [&](int w, int workers) {
    for (int z = w; z < n; z += workers)
      cells[static_cast<std::size_t>(z)] = sample_cell(net, action, z, measures[static_cast<std::size_t>(z)], seed, options);
  };
  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }

  std::vector<WeightedArc> arcs;
  std::vector<int> accepted(static_cast<std::size_t>(n));
  std::vector<std::string> warnings;
  int empty = 0;
  for (int z = 0; z < n; ++z) {
    auto& c = cells[static_cast<std::size_t>(z)];
    accepted[static_cast<std::size_t>(z)] = c.accepted;
    if (c.accepted == 0) ++empty;
    arcs.insert(arcs.end(), c.arcs.begin(), c.arcs.end());
  }
  if (empty > 0) warnings.push_back(std::to_string(empty) + " cell(s) produced no samples; they keep only type-2 edges");

  std::vector<Edge> type2;
  if (options.variant == Variant::kFull) {
    const double r = 3.0 / net.t();
    for (VertexId z = 0; z < n; ++z)
      net.index().for_each_within(net.point(z), r, [&](VertexId y, double) {
        if (y > z) type2.emplace_back(z, y);
      });
  }

  std::vector<int> inverse(static_cast<std::size_t>(action.size()));
  for (int s = 0; s < action.size(); ++s) inverse[static_cast<std::size_t>(s)] = action.inverse_of(s);
  WarpedGraph g(net.t(), n, options.variant, std::move(inverse), std::move(arcs), std::move(type2),
                std::vector<double>(measures.begin(), measures.end()));
  g.n_per_cell = options.n_per_cell;
  g.seed = seed;
  g.accepted_per_cell = std::move(accepted);
  g.warnings = std::move(warnings);
  return g;
}

DegreeReport degree_report(const WarpedGraph& graph, const AhlforsEstimate& ahlfors, const Action& action) {
  DegreeReport r;
  const int n = graph.num_vertices();
  const Graph t2 = graph.type2_graph();
  const Graph all = graph.union_graph();
  r.max_type2 = t2.max_degree();
  r.mean_type2 = t2.mean_degree();
  r.max_total = all.max_degree();
  r.mean_total = all.mean_degree();

  const int ns = graph.num_generators();
  r.max_type1_per_gen.assign(static_cast<std::size_t>(ns), 0);
  r.mean_type1_per_gen.assign(static_cast<std::size_t>(ns), 0.0);
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int s = 0; s < ns; ++s) {
    std::fill(out.begin(), out.end(), 0);
    for (const auto& a : graph.arcs())
      if (a.gen == s && a.src != a.dst && a.weight > 0.0) ++out[static_cast<std::size_t>(a.src)];
    if (n > 0) {
      r.max_type1_per_gen[static_cast<std::size_t>(s)] = *std::max_element(out.begin(), out.end());
      double sum = 0;
      for (int v : out) sum += v;
      r.mean_type1_per_gen[static_cast<std::size_t>(s)] = sum / n;
    }
  }

  const double L = action.max_lipschitz();
  r.bound_type2 = ahlfors.C * std::pow(8.0, ahlfors.m);
  r.bound_type1_per_gen = ahlfors.C * std::pow(2.0 * L + 4.0, ahlfors.m);
  r.bound_total = r.bound_type2 + ns * r.bound_type1_per_gen;
  r.violation = r.max_type2 > r.bound_type2 || r.max_total > r.bound_total;
  for (int v : r.max_type1_per_gen)
    if (v > r.bound_type1_per_gen) r.violation = true;
  return r;
}

}  // namespace warpcone
