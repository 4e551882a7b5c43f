#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "warpcone/qi.hpp"
#include "warpcone/spectra.hpp"

using namespace warpcone;

TEST_SUITE("qi") {
  TEST_CASE("ball sizes") {
    CHECK(ball_size(0, 5) == 1);
    CHECK(ball_size(4, 0) == 1);
    CHECK(ball_size(1, 7) == 2);
    CHECK(ball_size(2, 3) == 7);
    CHECK(ball_size(3, 1) == 4);
    CHECK(ball_size(3, 2) == 10);
    CHECK(ball_size(3, 1.2) == 10);
    CHECK(ball_size(4, 3) == 1 + 4 + 12 + 36);
    // Brute force against the D-regular tree.
    for (int D = 3; D <= 6; ++D)
      for (int r = 0; r <= 5; ++r) {
        double count = 1, shell = D;
        for (int i = 1; i <= r; ++i, shell *= D - 1) count += shell;
        CHECK(ball_size(D, r) == count);
      }
  }

  TEST_CASE("transfer bound") {
    QIParams id;
    id.D = 3;
    for (double e : {0.1, 0.5, 1.0, 3.0}) CHECK(transfer_bound(e, id) == doctest::Approx(1.0 / (16.0 / e + 2.0)).epsilon(1e-15));
    CHECK(transfer_bound(std::numeric_limits<double>::infinity(), id) == doctest::Approx(0.5));
    QIParams q{2, 1, 1, 4};
    const double kA = 5, kB = 5, kCA = 1 + 4 + 12 + 36;
    CHECK(transfer_bound(0.7, q) == doctest::Approx(1.0 / (kA * kA * kA * kB * kB * kCA * kCA / 0.7 + 2 * kB * kB)).epsilon(1e-14));
    CHECK(transfer_bound(0.2, q) < transfer_bound(0.3, q));
    CHECK_THROWS_AS(transfer_bound(0.0, q), InputError);
    CHECK_THROWS_AS(transfer_bound(-1.0, q), InputError);
  }

  TEST_CASE("subdivision") {
    const Subdivision s = subdivide(Graph::complete(3), 1);
    CHECK(s.graph.num_vertices() == 6);
    CHECK(s.graph.num_edges() == 6);
    CHECK(oracle::lambda2(s.graph) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.params.C == 2);
    CHECK(s.params.A == 0);
    CHECK(s.params.B == 1);
    CHECK(s.params.D == 2);

    const Subdivision p = subdivide(Graph::path(2), 1);
    CHECK(p.graph.num_vertices() == 3);
    CHECK(oracle::lambda2(p.graph) == doctest::Approx(1.0).epsilon(1e-12));

    for (int k : {1, 2, 5}) {
      const Graph g = Graph::complete(5);
      const Subdivision sk = subdivide(g, k);
      CHECK(sk.graph.num_edges() == (k + 1) * g.num_edges());
      CHECK(sk.graph.num_vertices() == g.num_vertices() + k * g.num_edges());
      CHECK(sk.params.B == std::ceil(k / 2.0));
    }
    CHECK_THROWS_AS(subdivide(Graph::complete(3), 0), InputError);
  }

  TEST_CASE("inclusion into the subdivision is a quasi-isometry") {
    for (int k : {1, 2, 3}) {
      const Graph g = Graph::complete(6);
      const Subdivision s = subdivide(g, k);
      const QIPairCheck c = check_subdivision_qi(g, s, 200, 7);
      CHECK(c.violations == 0);
      CHECK(c.codensity_radius <= s.params.B);
    }
  }

  TEST_CASE("complete graphs transfer their expansion") {
    std::vector<Graph> family;
    for (int n = 2; n <= 6; ++n) family.push_back(Graph::complete(n));
    EtaOptions o;
    o.seed = 3;
    const QIReport r = qi_invariance_check(family, 1, o);
    REQUIRE(r.members.size() == family.size());
    CHECK(r.precondition_met);
    CHECK(r.violations == 0);
    CHECK(r.params.D == 5);
    double min_eta = 1e300;
    for (std::size_t i = 0; i < family.size(); ++i) {
      const auto& m = r.members[i];
      CHECK(m.eta_G == doctest::Approx(oracle::eta_p1_exhaustive(family[i])).epsilon(1e-12));
      CHECK(m.eta_G_certified);
      CHECK(m.margin >= 0.0);
      CHECK(m.qi_violations == 0);
      if (m.n_vertices_subdivided <= 12) CHECK(m.eta_H == doctest::Approx(oracle::eta_p1_exhaustive(subdivide(family[i], 1).graph)).epsilon(1e-12));
      min_eta = std::min(min_eta, m.eta_G);
    }
    CHECK(r.min_eta_G == doctest::Approx(min_eta));

    const QIReport one = qi_invariance_check({Graph::complete(4)}, 2, o);
    CHECK(one.members.size() == 1);
    CHECK(one.violations == 0);
  }
}
