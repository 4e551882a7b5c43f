#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "warpcone/eta.hpp"
#include "warpcone/harness.hpp"
#include "warpcone/net.hpp"
#include "warpcone/qi.hpp"
#include "warpcone/rng.hpp"
#include "warpcone/spectra.hpp"
#include "warpcone/warp_graph.hpp"

namespace py = pybind11;
using namespace warpcone;

namespace {

Point to_point(const std::vector<double>& v) {
  Point p(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i];
  return p;
}

std::vector<double> from_point(const Point& p) {
  std::vector<double> v(static_cast<std::size_t>(p.dim()));
  for (int i = 0; i < p.dim(); ++i) v[static_cast<std::size_t>(i)] = p[i];
  return v;
}

std::vector<std::pair<int, int>> edge_list(const Graph& g) { return {g.edges().begin(), g.edges().end()}; }

py::dict qi_params(const QIParams& q) {
  py::dict d;
  d["C"] = q.C;
  d["A"] = q.A;
  d["B"] = q.B;
  d["D"] = q.D;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Warped-cone graph families";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<Space, std::shared_ptr<Space>>(m, "Space")
      .def_property_readonly("dim", &Space::dim)
      .def_property_readonly("name", &Space::name)
      .def_property_readonly("diameter", &Space::diameter)
      .def("distance", [](const Space& s, const std::vector<double>& x, const std::vector<double>& y) {
        return s.distance(to_point(x), to_point(y));
      });
  m.def("make_space", [](const std::string& spec) { return std::const_pointer_cast<Space>(make_space(spec)); },
        py::arg("spec"));

  py::class_<Action>(m, "Action")
      .def_static("sl2z", [](std::shared_ptr<Space> s) { return Action::sl2z(s); })
      .def_static("rotation", [](std::shared_ptr<Space> s, const std::vector<double>& v) { return Action::rotation(s, to_point(v)); })
      .def_static("identity", [](std::shared_ptr<Space> s) { return Action::identity(s); })
      .def("__len__", &Action::size)
      .def("inverse_of", &Action::inverse_of)
      .def("max_lipschitz", &Action::max_lipschitz)
      .def("apply", [](const Action& a, int s, const std::vector<double>& x) { return from_point(a.apply(s, to_point(x))); });

  py::class_<Graph>(m, "Graph")
      .def(py::init([](int n, const std::vector<std::pair<int, int>>& e) { return Graph(n, {e.begin(), e.end()}); }),
           py::arg("n"), py::arg("edges"))
      .def_static("complete", &Graph::complete)
      .def_static("cycle", &Graph::cycle)
      .def_static("path", &Graph::path)
      .def_property_readonly("num_vertices", &Graph::num_vertices)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("edges", &edge_list)
      .def("max_degree", &Graph::max_degree)
      .def("connected", &Graph::connected);

  py::class_<Net>(m, "Net")
      .def("__len__", &Net::size)
      .def_property_readonly("t", &Net::t)
      .def_property_readonly("points", [](const Net& n) {
        Eigen::MatrixXd out(n.size(), n.space().dim());
        for (int z = 0; z < n.size(); ++z)
          for (int c = 0; c < n.space().dim(); ++c) out(z, c) = n.point(z)[c];
        return out;
      })
      .def_property_readonly("cell_measures", [](const Net& n) { return std::vector<double>(n.cell_measures().begin(), n.cell_measures().end()); })
      .def("min_separation", &Net::min_separation)
      .def("assign_cell", [](const Net& n, const std::vector<double>& x) { return n.assign_cell(to_point(x)); });

  m.def(
      "build_net",
      [](std::shared_ptr<Space> space, double t, std::uint64_t seed, std::int64_t samples) {
        Net net = build_net(space, t, substream(seed, "net"));
        const std::int64_t n = samples > 0 ? samples : 400LL * net.size();
        net.attach_measures(estimate_cell_measures(net, n, substream(seed, "measures")));
        return net;
      },
      py::arg("space"), py::arg("t"), py::arg("seed") = 1, py::arg("samples") = 0,
      "1/t-separated net with Monte-Carlo cell measures attached");

  py::class_<WarpedGraph>(m, "WarpedGraph")
      .def_property_readonly("t", &WarpedGraph::t)
      .def_property_readonly("num_vertices", &WarpedGraph::num_vertices)
      .def_property_readonly("num_generators", &WarpedGraph::num_generators)
      .def_property_readonly("cell_measures", &WarpedGraph::cell_measures)
      .def("union_graph", &WarpedGraph::union_graph)
      .def("type1_graph", &WarpedGraph::type1_graph)
      .def("type2_graph", &WarpedGraph::type2_graph);

  m.def(
      "build_graph",
      [](const Net& net, const Action& action, std::uint64_t seed, int samples_per_cell, const std::string& variant) {
        GraphBuildOptions o;
        o.n_per_cell = samples_per_cell;
        o.variant = parse_variant(variant);
        return build_graph(net, action, substream(seed, "edges"), o);
      },
      py::arg("net"), py::arg("action"), py::arg("seed") = 1, py::arg("samples_per_cell") = 200,
      py::arg("variant") = "full");

  m.def("lambda2", [](const Graph& g) { return lambda2(g).value; }, py::arg("graph"));
  m.def("lambda2", [](const WarpedGraph& g) { return lambda2(g).value; }, py::arg("graph"));
  m.def("kappa_hat", [](const WarpedGraph& g) { return kappa_hat(g, g.cell_measures()).value; }, py::arg("graph"));
  m.def(
      "markov_norm",
      [](const WarpedGraph& g) {
        const auto r = markov_norm(g, g.cell_measures());
        py::dict d;
        d["norm"] = r.norm;
        d["lazy_norm"] = r.lazy_norm;
        d["max_mass_deficit"] = r.max_mass_deficit;
        return d;
      },
      py::arg("graph"));

  m.def(
      "eta",
      [](const Graph& g, double p, int target_dim, int restarts, std::uint64_t seed) {
        EtaOptions o;
        o.p = p;
        o.target_dim = target_dim;
        o.restarts = restarts;
        o.seed = seed;
        const EtaResult r = eta(g, o);
        py::dict d;
        d["value"] = r.value;
        d["certified"] = r.certified;
        d["minimizer"] = r.minimizer;
        return d;
      },
      py::arg("graph"), py::arg("p") = 2.0, py::arg("target_dim") = 1, py::arg("restarts") = 8, py::arg("seed") = 0);
  m.def("poincare_quotient", &poincare_quotient, py::arg("graph"), py::arg("f"), py::arg("p"));

  m.def(
      "pairwise_form_ratio",
      [](const std::vector<double>& mu, const Eigen::MatrixXd& f, double q) { return pairwise_form_ratio(mu, f, q).ratio; },
      py::arg("measures"), py::arg("f"), py::arg("q") = 2.0);

  m.def("ball_size", &ball_size, py::arg("D"), py::arg("r"));
  m.def(
      "transfer_bound",
      [](double eta_G, double C, double A, double B, int D) { return transfer_bound(eta_G, QIParams{C, A, B, D}); },
      py::arg("eta_G"), py::arg("C"), py::arg("A"), py::arg("B"), py::arg("D"));
  m.def(
      "subdivide",
      [](const Graph& g, int k) {
        Subdivision s = subdivide(g, k);
        return py::make_tuple(s.graph, qi_params(s.params));
      },
      py::arg("graph"), py::arg("k"));

  m.def(
      "run_family",
      [](const std::string& config_path, const std::string& csv_path) {
        const ExperimentConfig cfg = ExperimentConfig::load(config_path);
        FamilyVerdict v;
        {
          py::gil_scoped_release release;
          v = run_family(cfg, csv_path);
        }
        py::dict d;
        d["verdict"] = to_string(v.verdict);
        d["size_growth"] = v.stats.size_growth;
        d["eta_ratio"] = v.stats.eta_ratio;
        d["eta_decay"] = v.stats.eta_decay;
        d["violations"] = v.violations;
        std::vector<double> ts, n, eta2, kappa;
        for (const auto& r : v.rows) {
          ts.push_back(r.t);
          n.push_back(r.n_vertices);
          eta2.push_back(r.eta_value(2.0));
          kappa.push_back(r.kappa_hat);
        }
        d["t"] = ts;
        d["n_vertices"] = n;
        d["eta_p2"] = eta2;
        d["kappa_hat"] = kappa;
        return d;
      },
      py::arg("config"), py::arg("csv"));
}
