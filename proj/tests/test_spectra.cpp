#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "warpcone/net.hpp"
#include "warpcone/rng.hpp"
#include "warpcone/spectra.hpp"

using namespace warpcone;

namespace {

WarpedGraph two_cell_swap() {
  // One self-inverse generator exchanging two cells of mass 1/2.
  return WarpedGraph(1.0, 2, Variant::kType1Only, {0}, {{0, 1, 0, 0.5}, {1, 0, 0, 0.5}}, {}, {0.5, 0.5});
}

// n equal cells, generator shifts cell z onto z + 1.
WarpedGraph cyclic_discretization(int n) {
  std::vector<WeightedArc> arcs;
  for (int z = 0; z < n; ++z) {
    arcs.push_back({z, (z + 1) % n, 0, 1.0 / n});
    arcs.push_back({z, (z + n - 1) % n, 1, 1.0 / n});
  }
  return WarpedGraph(1.0, n, Variant::kType1Only, {1, 0}, arcs, {}, std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

WarpedGraph level(const char* space, const Action& action, double t, std::uint64_t seed) {
  Net net = build_net(make_space(space), t, seed);
  net.attach_measures(estimate_cell_measures(net, 400LL * net.size(), seed + 1));
  return build_graph(net, action, seed + 2);
}

}  // namespace

TEST_SUITE("spectra") {
  TEST_CASE("lambda2 closed forms") {
    for (int n : {2, 3, 5, 10, 40}) CHECK(lambda2(Graph::complete(n)).value == doctest::Approx(n).epsilon(1e-10));
    for (int n : {3, 4, 7, 50, 200}) CHECK(lambda2(Graph::cycle(n)).value == doctest::Approx(2 - 2 * std::cos(2 * M_PI / n)).epsilon(1e-8));
    for (int n : {2, 9, 100}) CHECK(lambda2(Graph::path(n)).value == doctest::Approx(2 - 2 * std::cos(M_PI / n)).epsilon(1e-8));
    const auto split = lambda2(Graph(4, {{0, 1}, {2, 3}}));
    CHECK(split.value == 0.0);
    CHECK_FALSE(split.connected);
    CHECK(lambda2(Graph(1, {})).value == 0.0);
  }

  TEST_CASE("lambda2 of a built level matches the dense oracle") {
    const WarpedGraph g = level("t2", Action::sl2z(make_space("t2")), 8, 3);
    REQUIRE(g.num_vertices() <= 200);
    const double expect = oracle::lambda2(g.union_graph());
    CHECK(lambda2(g).value == doctest::Approx(expect).epsilon(1e-8));
  }

  TEST_CASE("kappa_hat") {
    const WarpedGraph swap = two_cell_swap();
    CHECK(kappa_hat(swap, swap.cell_measures()).value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(oracle::kappa(swap, swap.cell_measures()) == doctest::Approx(2.0).epsilon(1e-10));

    const WarpedGraph id = level("t2", Action::identity(make_space("t2")), 6, 1);
    const auto k0 = kappa_hat(id, id.cell_measures());
    CHECK(k0.value == 0.0);
    CHECK_FALSE(k0.connected);

    for (int n : {3, 5, 12, 31}) {
      const WarpedGraph c = cyclic_discretization(n);
      CHECK(kappa_hat(c, c.cell_measures()).value == doctest::Approx(2 - 2 * std::cos(2 * M_PI / n)).epsilon(1e-8));
    }

    const WarpedGraph sl = level("t2", Action::sl2z(make_space("t2")), 8, 4);
    CHECK(kappa_hat(sl, sl.cell_measures()).value == doctest::Approx(oracle::kappa(sl, sl.cell_measures())).epsilon(1e-8));

    std::vector<double> bad(sl.cell_measures());
    bad[0] = 0.0;
    CHECK_THROWS_AS(kappa_hat(sl, bad), InputError);
    CHECK_THROWS_AS(kappa_hat(sl, std::vector<double>{1.0}), InputError);
  }

  TEST_CASE("kappa_hat decays for an irrational rotation") {
    auto circle = make_space("circle");
    const Action rot = Action::rotation(circle, Point{std::sqrt(2.0) - 1});
    double first = 0, last = 0;
    for (double t : {8.0, 32.0, 128.0}) {
      const WarpedGraph g = level("circle", rot, t, 5);
      const double k = kappa_hat(g, g.cell_measures()).value;
      if (t == 8.0) first = k;
      last = k;
    }
    CHECK(last < 0.5 * first);
  }

  TEST_CASE("markov norm") {
    const WarpedGraph swap = two_cell_swap();
    const auto m = markov_norm(swap, swap.cell_measures());
    CHECK(m.norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.lazy_norm == doctest::Approx(0.0).epsilon(1e-12));

    const WarpedGraph id = level("t2", Action::identity(make_space("t2")), 6, 1);
    const auto mi = markov_norm(id, id.cell_measures());
    CHECK(mi.norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mi.lazy_norm == doctest::Approx(1.0).epsilon(1e-12));

    for (const WarpedGraph& g : {swap, id, level("t2", Action::sl2z(make_space("t2")), 8, 2),
                                 level("circle", Action::rotation(make_space("circle"), Point{std::sqrt(2.0) - 1}), 16, 2)}) {
      const auto mk = markov_norm(g, g.cell_measures());
      const double k = kappa_hat(g, g.cell_measures()).value;
      CHECK(mk.norm <= 1.0);
      CHECK((mk.lazy_norm < 1.0 - 1e-9) == (k > 1e-9));
    }
  }

  TEST_CASE("markov norm against a dense walk") {
    const WarpedGraph g = level("t2", Action::sl2z(make_space("t2")), 8, 6);
    const Eigen::MatrixXd w = oracle::dense_weights(g);
    const Eigen::VectorXd deg = w.rowwise().sum();
    const Eigen::VectorXd r = deg.cwiseSqrt();
    const Eigen::MatrixXd s = r.cwiseInverse().asDiagonal() * w * r.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd q = oracle::complement_basis(r);
    const Eigen::VectorXd ev = oracle::dense_spectrum(q.transpose() * s * q);
    const auto mk = markov_norm(g, g.cell_measures());
    CHECK(mk.norm == doctest::Approx(std::max(std::fabs(ev(0)), std::fabs(ev(ev.size() - 1)))).epsilon(1e-8));
    CHECK(mk.lazy_norm == doctest::Approx((1 + ev(ev.size() - 1)) / 2).epsilon(1e-8));
    // Symmetrized rows carry the inflow, which is only measure-preserving up
    // to sampling noise of order 1/sqrt(#S n_per_cell).
    CHECK(mk.max_mass_deficit < 5.0 / std::sqrt(4.0 * g.n_per_cell));
    CHECK(mk.max_mass_deficit > 0.0);
  }

  TEST_CASE("pairwise form ratio") {
    const std::vector<double> mu{0.5, 0.5};
    Eigen::MatrixXd f(2, 1);
    f << 1, -1;
    CHECK(pairwise_form_ratio(mu, f).ratio == doctest::Approx(std::sqrt(2.0)));
    const auto zero = pairwise_form_ratio(mu, Eigen::MatrixXd::Zero(2, 1));
    CHECK(zero.degenerate);
    CHECK(zero.ratio == 1.0);
    f << 1, 0;
    CHECK_THROWS_AS(pairwise_form_ratio(mu, f), InputError);

    Rng rng(21);
    for (int i = 0; i < 1000; ++i) {
      const int n = 1 + static_cast<int>(rng.below(100));
      const int d = 1 + static_cast<int>(rng.below(3));
      std::vector<double> m(static_cast<std::size_t>(n));
      double total = 0;
      for (auto& v : m) total += (v = rng.uniform() + 1e-3);
      for (auto& v : m) v /= total;
      Eigen::MatrixXd g(n, d);
      for (int z = 0; z < n; ++z)
        for (int c = 0; c < d; ++c) g(z, c) = rng.normal();
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
      for (int z = 0; z < n; ++z) mean += m[static_cast<std::size_t>(z)] * g.row(z);
      g.rowwise() -= mean;
      const auto r = pairwise_form_ratio(m, g);
      if (!r.degenerate) {
        REQUIRE(r.ratio >= 0.5);
        REQUIRE(r.ratio <= 2.0);
      }
    }
  }

  TEST_CASE("forward inequality margins") {
    const WarpedGraph swap = two_cell_swap();
    SpectrumOptions o;
    o.p_list = {2};
    const SpectralReport r = analyze_level(swap, 1.0, o);
    CHECK(r.eta_value(2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.lambda2 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.kappa_hat == doctest::Approx(2.0).epsilon(1e-12));
    const auto m = inequality_margins(r, 1);
    CHECK(m.forward_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.forward_margin == doctest::Approx(0.0).epsilon(1e-9));

    const WarpedGraph id = level("t2", Action::identity(make_space("t2")), 6, 1);
    const SpectralReport ri = analyze_level(id, 6.0, o);
    CHECK(ri.kappa_hat == 0.0);
    CHECK(inequality_margins(ri, 1).forward_margin >= 0.0);

    SpectralReport empty;
    empty.K_hat = 1.0;
    CHECK_THROWS_AS(inequality_margins(empty, 1), InputError);
  }

  TEST_CASE("eta under edge removal") {
    auto t2 = make_space("t2");
    Net net = build_net(t2, 8, 4);
    net.attach_measures(estimate_cell_measures(net, 400LL * net.size(), 5));
    const WarpedGraph full = build_graph(net, Action::sl2z(t2), 6);
    GraphBuildOptions o;
    o.variant = Variant::kType1Only;
    const WarpedGraph t1 = build_graph(net, Action::sl2z(t2), 6, o);
    CHECK(lambda2(full).value >= lambda2(t1).value - 1e-9);
  }
}
