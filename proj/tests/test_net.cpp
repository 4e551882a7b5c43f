#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "warpcone/net.hpp"
#include "warpcone/rng.hpp"

using namespace warpcone;

namespace {

VertexId brute_owner(const Net& net, const Point& x) {
  VertexId best = 0;
  double bd = net.space().distance(x, net.point(0));
  for (VertexId z = 1; z < net.size(); ++z) {
    const double d = net.space().distance(x, net.point(z));
    if (d < bd - 1e-12) {
      bd = d;
      best = z;
    }
  }
  return best;
}

Net circle_net(std::vector<double> pts, double t) {
  std::vector<Point> p;
  for (double v : pts) p.push_back(Point{v});
  return Net(make_space("circle"), t, p, 0);
}

}  // namespace

TEST_SUITE("net") {
  TEST_CASE("level below one is rejected") { CHECK_THROWS_AS(build_net(make_space("t2"), 0.5, 1), InputError); }

  TEST_CASE("circle at t=4 has 3 or 4 points") {
    const auto sizes = oracle::maximal_separated_sizes(48, 4);
    CHECK(sizes == std::vector<int>{3, 4});
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Net net = build_net(make_space("circle"), 4, seed);
      CHECK(std::find(sizes.begin(), sizes.end(), net.size()) != sizes.end());
    }
  }

  TEST_CASE("degenerate level has a single cell") {
    Net net = build_net(make_space("t2"), 1, 3);
    CHECK(net.size() == 1);
    const auto m = estimate_cell_measures(net, 100, 1);
    REQUIRE(m.values.size() == 1);
    CHECK(m.values[0] == 1.0);
  }

  TEST_CASE("separation and density over levels and seeds") {
    for (const char* name : {"circle", "t2"}) {
      auto s = make_space(name);
      for (double t : {2.0, 5.5, 9.0, 16.0}) {
        for (std::uint64_t seed : {1ULL, 2ULL}) {
          const Net net = build_net(s, t, seed);
          if (net.size() > 1) CHECK(net.min_separation() >= 1.0 / t);
          const auto dens = check_density(net, 20000, seed + 100);
          CHECK(dens.violations == 0);
          CHECK(dens.max_owner_distance <= 1.0 / t);
        }
      }
    }
  }

  TEST_CASE("net size within packing and covering bounds") {
    auto t2 = make_space("t2");
    const auto ahl = verify_ahlfors(*t2, 16, default_ahlfors_radii(*t2, 0.02), 100000, 4);
    const double t = 16;
    const Net net = build_net(t2, t, 8);
    // Disjoint balls of radius 1/(2t) and covering balls of radius 1/t.
    const double upper = 1.0 / (ahl.c * std::pow(1.0 / (2 * t), ahl.m));
    const double lower = 1.0 / (ahl.c * ahl.C * std::pow(1.0 / t, ahl.m));
    CHECK(net.size() >= lower);
    CHECK(net.size() <= upper);
  }

  TEST_CASE("assign_cell") {
    const Net net = build_net(make_space("t2"), 8, 2);
    for (VertexId z = 0; z < net.size(); ++z) REQUIRE(net.assign_cell(net.point(z)) == z);
    Rng rng(17);
    const double t = net.t();
    for (int i = 0; i < 1000; ++i) {
      const Point x = net.space().sample(rng);
      const VertexId z = net.assign_cell(x);
      REQUIRE(z == brute_owner(net, x));
      REQUIRE(net.space().distance(x, net.point(z)) <= 1.0 / t);
      for (VertexId y = 0; y < net.size(); ++y)
        if (net.space().distance(x, net.point(y)) < 1.0 / (2 * t)) REQUIRE(z == y);
    }
    const Net three = circle_net({0.0, 1.0 / 3, 2.0 / 3}, 3);
    const Point mid{1.0 / 6};
    CHECK(brute_owner(three, mid) == 0);
    CHECK(three.assign_cell(mid) == 0);
  }

  TEST_CASE("cell measures on a symmetric circle net") {
    Net net = circle_net({0.0, 0.25, 0.5, 0.75}, 4);
    const std::int64_t n = 200000;
    const auto m = estimate_cell_measures(net, n, 5);
    const auto arcs = oracle::circle_voronoi_arcs({0.0, 0.25, 0.5, 0.75});
    double sum = 0.0;
    for (std::size_t z = 0; z < 4; ++z) {
      CHECK(std::fabs(m.values[z] - arcs[z]) <= 3.0 / std::sqrt(static_cast<double>(n)));
      sum += m.values[z];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_FALSE(m.smoothed);
    CHECK_THROWS_AS(estimate_cell_measures(net, 39, 1), InputError);
  }

  TEST_CASE("uneven circle net matches arc lengths") {
    const std::vector<double> pts{0.0, 0.3, 0.45, 0.8};
    Net net = circle_net(pts, 2);
    const std::int64_t n = 400000;
    const auto m = estimate_cell_measures(net, n, 6);
    const auto arcs = oracle::circle_voronoi_arcs(pts);
    for (std::size_t z = 0; z < pts.size(); ++z) CHECK(std::fabs(m.values[z] - arcs[z]) <= 3.0 / std::sqrt(static_cast<double>(n)));
  }

  TEST_CASE("empty cells are smoothed") {
    Net net = circle_net({0.0, 1e-9, 2e-9, 0.5}, 1);
    const auto m = estimate_cell_measures(net, 40, 1);
    CHECK(m.smoothed);
    CHECK_FALSE(m.warnings.empty());
    CHECK(m.values[1] == doctest::Approx(1.0 / 44));
    CHECK(std::accumulate(m.values.begin(), m.values.end(), 0.0) == doctest::Approx(1.0));
  }

  TEST_CASE("worker split is deterministic") {
    Net net = build_net(make_space("t2"), 8, 1);
    const auto a = estimate_cell_measures(net, 50000, 3, 3);
    const auto b = estimate_cell_measures(net, 50000, 3, 3);
    CHECK(a.values == b.values);
    CHECK(std::accumulate(a.values.begin(), a.values.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("cell measures respect the K bounds") {
    auto t2 = make_space("t2");
    const auto ahl = verify_ahlfors(*t2, 16, default_ahlfors_radii(*t2, 0.02), 100000, 4);
    const double K = ahl.K();
    Net net = build_net(t2, 16, 3);
    const int per_cell = 2000;
    const auto m = estimate_cell_measures(net, static_cast<std::int64_t>(per_cell) * net.size(), 9);
    const double tol = 5.0 / std::sqrt(per_cell);
    const double lo = *std::min_element(m.values.begin(), m.values.end());
    const double hi = *std::max_element(m.values.begin(), m.values.end());
    CHECK(lo >= (1 - tol) / (K * net.size()));
    CHECK(hi <= (1 + tol) * K / net.size());
    CHECK(hi / lo <= K * K);
  }

  TEST_CASE("Ahlfors constants") {
    auto t2 = make_space("t2");
    const std::vector<double> small{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    const auto a = verify_ahlfors(*t2, 16, small, 100000, 2);
    CHECK(a.m == doctest::Approx(2.0).epsilon(0.05));
    CHECK(a.c_fit == doctest::Approx(M_PI).epsilon(0.1));
    CHECK(a.c > 0.0);
    CHECK(a.C >= 1.0);
    for (const auto& s : a.samples) {
      CHECK(s.measure >= a.c * std::pow(s.radius, a.m) * (1 - 1e-12));
      CHECK(s.measure <= a.c * a.C * std::pow(s.radius, a.m) * (1 + 1e-12));
    }

    auto circle = make_space("circle");
    const auto b = verify_ahlfors(*circle, 16, {0.02, 0.05, 0.1, 0.2, 0.3}, 100000, 2);
    CHECK(b.m == doctest::Approx(1.0).epsilon(0.05));
    CHECK(b.c_fit == doctest::Approx(2.0).epsilon(0.1));

    const auto w = verify_ahlfors(*t2, 16, default_ahlfors_radii(*t2, 0.05), 50000, 3);
    CHECK(std::isfinite(w.C));
    CHECK(w.C >= 1.0);
    CHECK(w.K() == doctest::Approx(w.C * std::pow(2.0, w.m)));

    CHECK_THROWS_AS(verify_ahlfors(*t2, 4, {0.1}, 1000, 1), InputError);
    CHECK_THROWS_AS(verify_ahlfors(*t2, 4, {0.1, 0.9}, 1000, 1), InputError);
  }
}
