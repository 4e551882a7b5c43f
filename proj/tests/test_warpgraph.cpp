#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "warpcone/distance_field.hpp"
#include "warpcone/net.hpp"
#include "warpcone/rng.hpp"
#include "warpcone/warp_graph.hpp"

using namespace warpcone;

namespace {

Net measured_net(const char* space, double t, std::uint64_t seed, int per_cell = 400) {
  Net net = build_net(make_space(space), t, seed);
  net.attach_measures(estimate_cell_measures(net, static_cast<std::int64_t>(per_cell) * net.size(), seed + 1));
  return net;
}

std::set<Edge> edge_set(const Graph& g) { return {g.edges().begin(), g.edges().end()}; }

}  // namespace

TEST_SUITE("warpgraph") {
  TEST_CASE("preconditions") {
    Net bare = build_net(make_space("t2"), 4, 1);
    const Action sl = Action::sl2z(make_space("t2"));
    CHECK_THROWS_AS(build_graph(bare, sl, 1), InputError);
    Net net = measured_net("t2", 4, 1);
    GraphBuildOptions o;
    o.n_per_cell = 10;
    CHECK_THROWS_AS(build_graph(net, sl, 1, o), InputError);
    CHECK_THROWS_AS(build_graph(net, Action::identity(make_space("circle")), 1), InputError);
  }

  TEST_CASE("identity action gives the 3/t Rips graph") {
    const Net net = measured_net("t2", 8, 2);
    const WarpedGraph g = build_graph(net, Action::identity(make_space("t2")), 3);
    CHECK(g.type1_graph().num_edges() == 0);
    std::set<Edge> rips;
    for (VertexId z = 0; z < net.size(); ++z)
      for (VertexId y = z + 1; y < net.size(); ++y)
        if (net.space().distance(net.point(z), net.point(y)) <= 3.0 / net.t()) rips.insert({z, y});
    CHECK(edge_set(g.type2_graph()) == rips);
    CHECK(edge_set(g.union_graph()) == rips);
  }

  TEST_CASE("rotation by one half pairs antipodal cells") {
    std::vector<Point> pts{Point{0.0}, Point{0.25}, Point{0.5}, Point{0.75}};
    auto circle = make_space("circle");
    Net net(circle, 4, pts, 0);
    net.attach_measures(estimate_cell_measures(net, 40000, 1));
    const Action half = Action::rotation(circle, Point{0.5});
    CHECK(half.size() == 1);
    GraphBuildOptions o;
    o.variant = Variant::kType1Only;
    const WarpedGraph g = build_graph(net, half, 4, o);
    CHECK(edge_set(g.type1_graph()) == std::set<Edge>{{0, 2}, {1, 3}});
    CHECK(g.type2_edges().empty());
  }

  TEST_CASE("mass conservation, symmetry and variant monotonicity") {
    const Net net = measured_net("t2", 8, 5);
    const Action sl = Action::sl2z(make_space("t2"));
    const WarpedGraph g = build_graph(net, sl, 6);
    const auto mu = net.cell_measures();
    for (int s = 0; s < sl.size(); ++s) {
      const auto mass = g.row_mass(s);
      for (int z = 0; z < net.size(); ++z) REQUIRE(mass[static_cast<std::size_t>(z)] == doctest::Approx(mu[static_cast<std::size_t>(z)]).epsilon(1e-12));
    }
    const Eigen::MatrixXd w = Eigen::MatrixXd(g.symmetrized_weights());
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((w - oracle::dense_weights(g)).cwiseAbs().maxCoeff() <= 1e-15);

    GraphBuildOptions o;
    o.variant = Variant::kType1Only;
    const WarpedGraph gp = build_graph(net, sl, 6, o);
    const auto full = edge_set(g.union_graph());
    const Graph gp_union = gp.union_graph();
    for (const auto& e : gp_union.edges()) REQUIRE(full.count(e) == 1);
    CHECK(edge_set(gp.type1_graph()) == edge_set(g.type1_graph()));

    // Every type-1 edge is witnessed by a sample: s u lands in the target cell.
    for (const auto& a : g.arcs()) REQUIRE(a.weight > 0.0);
  }

  TEST_CASE("degree report") {
    WarpedGraph single(1.0, 1, Variant::kFull, {0}, {{0, 0, 0, 1.0}}, {}, {1.0});
    AhlforsEstimate ahl;
    ahl.c = 2;
    ahl.m = 1;
    ahl.C = 1;
    const auto r = degree_report(single, ahl, Action::identity(make_space("circle")));
    CHECK(r.max_total == 0);
    CHECK(r.max_type2 == 0);
    CHECK_FALSE(r.violation);

    auto circle = make_space("circle");
    const Net net = measured_net("circle", 8, 3);
    const WarpedGraph g = build_graph(net, Action::identity(circle), 4);
    const auto ca = verify_ahlfors(*circle, 16, default_ahlfors_radii(*circle, 0.01), 100000, 7);
    const auto rep = degree_report(g, ca, Action::identity(circle));
    for (VertexId z = 0; z < net.size(); ++z) {
      int count = 0;  // arc-counting oracle
      for (VertexId y = 0; y < net.size(); ++y)
        if (y != z && circle->distance(net.point(z), net.point(y)) <= 3.0 / 8) ++count;
      CHECK(g.type2_graph().degree(z) == count);
      CHECK(count >= 2);
      CHECK(count <= 6);
    }
    CHECK(rep.max_type2 <= rep.bound_type2);
    CHECK_FALSE(rep.violation);
  }

  TEST_CASE("degree bound for the SL2(Z) action") {
    auto t2 = make_space("t2");
    const Action sl = Action::sl2z(t2);
    const auto ahl = verify_ahlfors(*t2, 16, default_ahlfors_radii(*t2, 0.02), 100000, 4);
    const WarpedGraph g = build_graph(measured_net("t2", 12, 9), sl, 10);
    const auto rep = degree_report(g, ahl, sl);
    CHECK(rep.bound_total == doctest::Approx(ahl.C * std::pow(8.0, ahl.m) + 4 * ahl.C * std::pow(2 * (1 + std::sqrt(2.0)) + 4, ahl.m)));
    CHECK(rep.max_total <= rep.bound_total);
    CHECK_FALSE(rep.violation);
  }

  TEST_CASE("warped distance without warping is the scaled metric") {
    auto circle = make_space("circle");
    const Action id = Action::identity(circle);
    const double t = 10;
    const WarpedDistanceField f(id, t, 8);
    Rng rng(3);
    const double h = 1.0 / std::ceil(8 * t);
    for (int i = 0; i < 50; ++i) {
      const Point x = circle->sample(rng), y = circle->sample(rng);
      CHECK(std::fabs(f.warped_distance(x, y) - t * circle->distance(x, y)) <= t * h + 1e-12);
    }
    auto t2 = make_space("t2");
    const WarpedDistanceField g(Action::identity(t2), 6, 8);
    const double h2 = 1.0 / std::ceil(8 * 6.0);
    for (int i = 0; i < 30; ++i) {
      const Point x = t2->sample(rng), y = t2->sample(rng);
      const double exact = 6 * t2->distance(x, y);
      // Stencil paths overshoot straight lines by at most 1/cos(atan(1/2)/2).
      CHECK(g.warped_distance(x, y) <= exact * 1.0275 + 6 * h2 * std::sqrt(2.0) + 1e-12);
      CHECK(g.warped_distance(x, y) >= exact - 6 * h2 * std::sqrt(2.0) - 1e-12);
    }
    CHECK(g.warped_distance({0.2, 0.2}, {0.2, 0.2}) == 0.0);
    CHECK_THROWS_AS(WarpedDistanceField(id, t, 3), InputError);
  }

  TEST_CASE("one generator hop costs at most one") {
    auto t2 = make_space("t2");
    const Action sl = Action::sl2z(t2);
    const WarpedDistanceField f(sl, 8, 8);
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
      const Point x = t2->sample(rng);
      for (int s = 0; s < sl.size(); ++s) CHECK(f.warped_distance(x, sl.apply(s, x)) <= 1.0 + f.snap_slack() + 1e-12);
    }
  }

  TEST_CASE("rotation orbit chains") {
    auto circle = make_space("circle");
    const double alpha = std::sqrt(2.0) - 1;
    const Action rot = Action::rotation(circle, Point{alpha});
    const WarpedDistanceField f(rot, 40, 8);
    for (int k = 1; k <= 6; ++k) {
      // Brute force: the k-hop chain 0 -> alpha -> ... -> k alpha costs k.
      const Point y{wrap_unit(k * alpha)};
      CHECK(f.warped_distance(Point{0.0}, y) <= k * (1.0 + f.snap_slack()) + 1e-12);
    }
  }

  TEST_CASE("bi-Lipschitz comparison at a small level") {
    auto t2 = make_space("t2");
    const Action sl = Action::sl2z(t2);
    const Net net = measured_net("t2", 8, 11);
    const WarpedGraph g = build_graph(net, sl, 12);
    const WarpedDistanceField f(sl, 8, 8);
    const auto rep = bilipschitz_check(g, net, f, 100, 13);
    CHECK(rep.violations == 0);
    const Graph u = g.union_graph();
    for (const auto& p : rep.pairs) {
      if (p.z == p.y) {
        CHECK(p.graph_distance == 0);
        CHECK(p.warped_distance == 0.0);
      }
      if (p.graph_distance == 1) CHECK(p.warped_distance <= 3.0 + 2.0);
    }
  }
}
