#pragma once

#include <cstdint>
#include <vector>

#include "warpcone/eta.hpp"
#include "warpcone/graph.hpp"

namespace warpcone {

/// Quasi-isometry constants of a map i: G -> H between graphs of degree <= D:
///   d_G(x, y) / C - A <= d_H(i x, i y) <= C d_G(x, y) + A,
/// and every vertex of H lies within B of the image.
struct QIParams {
  double C = 1.0;
  double A = 0.0;
  double B = 0.0;
  int D = 0;
};

/// Largest possible number of vertices in a ball of radius r (rounded up) in
/// a graph of maximum degree D; exact tree bound.
double ball_size(int D, double r);

/// Expansion constant at p = 1 guaranteed for any H quasi-isometric to G:
///   1 / (K_A^3 K_B^2 K_{C+A}^2 / eta_G + 2 K_B^2).
double transfer_bound(double eta_G, const QIParams& params);

struct Subdivision {
  Graph graph;  // original vertices keep their ids
  QIParams params;
};

/// Every edge becomes a path with k + 1 edges.
Subdivision subdivide(const Graph& graph, int k);

struct QIPairCheck {
  int n_pairs = 0;
  int violations = 0;
  int codensity_radius = 0;  // max distance from a vertex of H to the image
};

/// Checks the QI inequalities of the inclusion G -> subdivide(G) on sampled
/// vertex pairs, and the co-density radius over all of H.
QIPairCheck check_subdivision_qi(const Graph& original, const Subdivision& sub, int n_pairs, std::uint64_t seed);

struct QIMember {
  int n_vertices = 0;
  int n_vertices_subdivided = 0;
  double eta_G = 0.0;
  double eta_H = 0.0;
  bool eta_G_certified = false;
  bool eta_H_certified = false;
  double bound = 0.0;
  double margin = 0.0;
  int qi_violations = 0;
};

struct QIReport {
  QIParams params;  // shared by the whole family
  double min_eta_G = 0.0;
  bool precondition_met = true;  // min eta_G > 0
  std::vector<QIMember> members;
  int violations = 0;
};

/// Subdivides each member k times, measures eta at p = 1 on both families and
/// compares with transfer_bound(min eta_G).
QIReport qi_invariance_check(const std::vector<Graph>& family, int k, const EtaOptions& options = {});

}  // namespace warpcone
