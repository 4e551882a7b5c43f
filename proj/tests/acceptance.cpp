// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <iostream>
#include <queue>
#include <sstream>

#include "oracles.hpp"
#include "warpcone/distance_field.hpp"
#include "warpcone/eta.hpp"
#include "warpcone/harness.hpp"
#include "warpcone/net.hpp"
#include "warpcone/qi.hpp"
#include "warpcone/rng.hpp"
#include "warpcone/spectra.hpp"

#ifndef WARPCONE_SOURCE_DIR
#define WARPCONE_SOURCE_DIR "."
#endif

using namespace warpcone;
namespace fs = std::filesystem;

namespace {

int failures = 0;
std::vector<int> selected;  // empty: all

bool wanted(int id) { return selected.empty() || std::find(selected.begin(), selected.end(), id) != selected.end(); }

void report(int id, const char* name, bool ok, const std::string& detail, double seconds) {
  std::printf("%s criterion %d (%s): %s [%.1fs]\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

void run(int id, const char* name, const std::function<bool(std::ostringstream&)>& body) {
  if (!wanted(id)) return;
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail << "exception: " << e.what();
  }
  report(id, name, ok, detail.str(), std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

Graph random_graph(Rng& rng, int n) {
  // Around the connectivity threshold ln(n)/n, so most but not all are connected.
  const double p = std::min(1.0, (0.7 + 3.0 * rng.uniform()) * std::log(n + 1.0) / n);
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) e.emplace_back(i, j);
  return Graph(n, e);
}

std::vector<int> bfs(const Graph& g, int src) {
  std::vector<int> d(static_cast<std::size_t>(g.num_vertices()), -1);
  std::queue<int> q;
  d[static_cast<std::size_t>(src)] = 0;
  q.push(src);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : g.neighbors(v))
      if (d[static_cast<std::size_t>(w)] < 0) {
        d[static_cast<std::size_t>(w)] = d[static_cast<std::size_t>(v)] + 1;
        q.push(w);
      }
  }
  return d;
}

int max_degree(const Graph& g) {
  int m = 0;
  for (int v = 0; v < g.num_vertices(); ++v) m = std::max(m, g.degree(v));
  return m;
}

// Tree ball size and the quasi-isometry transfer constant, written out here
// independently of the library.
double tree_ball(int D, double r) {
  const int R = static_cast<int>(std::ceil(r));
  if (R == 0 || D == 0) return 1;
  if (D == 1) return 2;
  double total = 1, shell = D;
  for (int i = 1; i <= R; ++i, shell *= D - 1) total += shell;
  return total;
}

double expected_bound(double eta_G, int k, int D) {
  const double C = k + 1, A = 0, B = std::ceil(k / 2.0);
  D = std::max(D, 2);
  const double kA = tree_ball(D, A), kB = tree_ball(D, B), kCA = tree_ball(D, C + A);
  return 1.0 / (kA * kA * kA * kB * kB * kCA * kCA / eta_G + 2 * kB * kB);
}

struct Level {
  Net net;
  WarpedGraph graph;
};

Level sl2z_level(double t, std::uint64_t seed) {
  auto t2 = make_space("t2");
  Net net = build_net(t2, t, substream(seed, "net"));
  net.attach_measures(estimate_cell_measures(net, 400LL * net.size(), substream(seed, "measures")));
  GraphBuildOptions o;
  o.n_per_cell = 200;
  WarpedGraph g = build_graph(net, Action::sl2z(t2), substream(seed, "edges"), o);
  return {std::move(net), std::move(g)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  const fs::path configs = fs::path(WARPCONE_SOURCE_DIR) / "configs";
  const fs::path work = fs::temp_directory_path() / "warpcone_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  run(1, "solver vs dense oracle", [](std::ostringstream& out) {
    Rng rng(101);
    double worst_l = 0, worst_e = 0;
    int bad = 0, disconnected = 0;
    for (int i = 0; i < 50; ++i) {
      const int n = 2 + static_cast<int>(rng.below(199));
      const Graph g = random_graph(rng, n);
      const double got = lambda2(g).value;
      EtaOptions o;
      o.seed = static_cast<std::uint64_t>(i);
      const double e = eta(g, o).value;
      const auto reach = bfs(g, 0);
      if (std::count(reach.begin(), reach.end(), -1) > 0) {
        // lambda2 is exactly 0; the dense oracle only resolves it to ~1e-15.
        ++disconnected;
        if (got != 0.0 || e != 0.0 || std::fabs(oracle::lambda2(g)) > 1e-10) ++bad;
        continue;
      }
      const double expect = oracle::lambda2(g);
      const double rel_l = std::fabs(got - expect) / expect;
      const double rel_e = std::fabs(e - got / 2) / (got / 2);
      worst_l = std::max(worst_l, rel_l);
      worst_e = std::max(worst_e, rel_e);
      if (!(rel_l <= 1e-8) || !(rel_e <= 1e-6)) ++bad;
    }
    out << "50 graphs (" << disconnected << " disconnected), worst rel err lambda2 " << worst_l
        << ", eta(2,1) vs lambda2/2 " << worst_e << ", " << bad << " failure(s)";
    return bad == 0;
  });

  run(2, "pairwise form ratio in [1/2, 2]", [](std::ostringstream& out) {
    Rng rng(202);
    int bad = 0;
    double lo = 1e300, hi = 0;
    for (int i = 0; i < 1000; ++i) {
      const int n = 1 + static_cast<int>(rng.below(100));
      const int d = 1 + static_cast<int>(rng.below(4));
      std::vector<double> mu(static_cast<std::size_t>(n));
      double total = 0;
      for (auto& v : mu) total += (v = std::pow(rng.uniform(), 3) + 1e-6);
      for (auto& v : mu) v /= total;
      Eigen::MatrixXd f(n, d);
      for (int z = 0; z < n; ++z)
        for (int c = 0; c < d; ++c) f(z, c) = rng.normal() * (1 + 10 * rng.uniform());
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
      for (int z = 0; z < n; ++z) mean += mu[static_cast<std::size_t>(z)] * f.row(z);
      f.rowwise() -= mean;
      const double q = std::array<double, 4>{1.0, 2.0, 3.0, std::numeric_limits<double>::infinity()}[rng.below(4)];
      const auto r = pairwise_form_ratio(mu, f, q);
      if (r.degenerate) continue;
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
      if (!(r.ratio >= 0.5 && r.ratio <= 2.0)) ++bad;
    }
    out << "range [" << lo << ", " << hi << "], " << bad << " violation(s)";
    return bad == 0;
  });

  // Levels shared by the degree and bi-Lipschitz criteria.
  std::vector<Level> levels;
  const std::vector<double> ts{8, 16, 32};

  run(3, "degree bound", [&](std::ostringstream& out) {
    auto t2 = make_space("t2");
    const AhlforsEstimate ahl = verify_ahlfors(*t2, 16, default_ahlfors_radii(*t2, 0.02), 100000, substream(3, "ahlfors"));
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 0, 1;
    const double L = oracle::max_singular_value(a);
    const double bound = ahl.C * std::pow(8.0, ahl.m) + 4 * ahl.C * std::pow(2 * L + 4, ahl.m);
    bool ok = std::fabs(L - (1 + std::sqrt(2.0))) < 1e-12;
    int dmin = 1 << 30, dmax = 0;
    for (double t : ts) {
      levels.push_back(sl2z_level(t, substream(33, "level", static_cast<std::uint64_t>(t))));
      const int d = max_degree(levels.back().graph.union_graph());
      out << "t=" << t << " #Z=" << levels.back().net.size() << " D=" << d << "; ";
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
      ok = ok && d <= bound;
    }
    ok = ok && dmax <= 2 * dmin;
    out << "bound " << bound << " (C=" << ahl.C << ", m=" << ahl.m << "), D ratio " << double(dmax) / dmin;
    return ok;
  });

  run(4, "bi-Lipschitz comparison", [&](std::ostringstream& out) {
    if (levels.empty())
      for (double t : ts) levels.push_back(sl2z_level(t, substream(33, "level", static_cast<std::uint64_t>(t))));
    auto t2 = make_space("t2");
    const Action act = Action::sl2z(t2);
    int bad = 0, pairs = 0;
    for (const Level& lv : levels) {
      const WarpedDistanceField field(act, lv.graph.t(), 8);
      const Graph g = lv.graph.union_graph();
      Rng rng(substream(44, "pairs", static_cast<std::uint64_t>(lv.graph.t())));
      double worst = -1e300;
      for (int i = 0; i < 100; ++i) {
        const int z = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.num_vertices())));
        const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.num_vertices())));
        const int dg = bfs(g, z)[static_cast<std::size_t>(y)];
        const double dw = field.warped_distance(lv.net.point(z), lv.net.point(y));
        ++pairs;
        if (dg < 0 || dw > 3.0 * dg + 2 || dg > 2 * std::ceil(dw) + 2) ++bad;
        worst = std::max({worst, dw - 3.0 * dg, dg - 2 * std::ceil(dw)});
      }
      out << "t=" << lv.graph.t() << " worst excess " << worst << "; ";
    }
    out << pairs << " pairs, " << bad << " violation(s)";
    return bad == 0;
  });
  levels.clear();

  // Full family runs.
  auto family = [&](const std::string& cfg_name, const std::string& csv) {
    ExperimentConfig c = ExperimentConfig::load((configs / cfg_name).string());
    c.output_dir = work.string();
    return run_family(c, (work / csv).string());
  };
  FamilyVerdict sl2z_a, sl2z_b, rotation, identity;
  bool have_sl2z = false, have_b = false;
  try {
    if (wanted(5) || wanted(6) || wanted(7) || wanted(9)) {
      sl2z_a = family("sl2z.cfg", "sl2z_a.csv");
      have_sl2z = true;
    }
  } catch (const std::exception& e) {
    std::cerr << "sl2z family failed: " << e.what() << "\n";
  }

  run(5, "forward inequality at every level", [&](std::ostringstream& out) {
    if (!have_sl2z) throw std::runtime_error("sl2z family did not run");
    bool ok = !sl2z_a.rows.empty();
    for (const auto& r : sl2z_a.rows) {
      const double eta2 = r.eta_value(2, 1);
      const double rhs = r.kappa_hat / (r.num_generators * r.K_hat * r.K_hat * r.K_hat) - 0.01;
      out << "t=" << r.t << " eta=" << eta2 << " rhs=" << rhs << "; ";
      ok = ok && eta2 >= rhs;
    }
    return ok;
  });

  run(6, "family verdicts", [&](std::ostringstream& out) {
    if (!have_sl2z) throw std::runtime_error("sl2z family did not run");
    rotation = family("rotation.cfg", "rotation.csv");
    identity = family("identity.cfg", "identity.csv");
    out << "sl2z " << to_string(sl2z_a.verdict) << " (growth " << sl2z_a.stats.size_growth << ", eta ratio "
        << sl2z_a.stats.eta_ratio << "); rotation " << to_string(rotation.verdict) << " (growth "
        << rotation.stats.size_growth << ", decay " << rotation.stats.eta_decay << "); identity "
        << to_string(identity.verdict) << " (growth " << identity.stats.size_growth << ", decay "
        << identity.stats.eta_decay << ")";
    return sl2z_a.verdict == Verdict::kExpanderConsistent && rotation.verdict == Verdict::kNonExpanderConsistent &&
           identity.verdict == Verdict::kNonExpanderConsistent;
  });

  run(7, "p-robustness", [&](std::ostringstream& out) {
    if (!have_sl2z) throw std::runtime_error("sl2z family did not run");
    bool ok = true;
    for (double p : {1.0, 2.0, 4.0}) {
      double lo = 1e300, hi = 0;
      for (const auto& r : sl2z_a.rows) {
        const double v = r.eta_value(p, 1);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      out << "p=" << p << " min/max " << lo / hi << "; ";
      ok = ok && hi > 0 && lo >= 0.5 * hi;
    }
    Rng rng(707);
    double worst = 0;
    for (int i = 0; i < 40; ++i) {
      const int n = 2 + static_cast<int>(rng.below(7));
      std::vector<Edge> e;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          if (rng.uniform() < 0.5) e.emplace_back(a, b);
      for (int a = 1; a < n; ++a) e.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(a))), a);
      const Graph g(n, e);
      EtaOptions o;
      o.p = 1;
      o.seed = static_cast<std::uint64_t>(i);
      worst = std::max(worst, std::fabs(eta(g, o).value - oracle::eta_p1_exhaustive(g)));
    }
    out << "p=1 on <= 8 vertices: worst error " << worst;
    return ok && worst <= 1e-6;
  });

  run(8, "subdivision transfer", [&](std::ostringstream& out) {
    bool ok = true;
    auto check = [&](const std::vector<Graph>& fam, const char* label) {
      EtaOptions o;
      o.seed = 808;
      const QIReport rep = qi_invariance_check(fam, 1, o);
      int D = 0;
      double min_eta = 1e300;
      for (const auto& g : fam) D = std::max(D, max_degree(g));
      for (const auto& m : rep.members) min_eta = std::min(min_eta, m.eta_G);
      const double bound = expected_bound(min_eta, 1, D);
      int bad = 0;
      double worst = 1e300;
      for (const auto& m : rep.members) {
        if (!(m.eta_H >= bound) || m.qi_violations > 0) ++bad;
        worst = std::min(worst, m.eta_H / bound);
      }
      out << label << ": " << rep.members.size() << " graphs, D=" << D << ", min eta_G " << min_eta << ", bound "
          << bound << ", worst eta_H/bound " << worst << ", " << bad << " violation(s); ";
      ok = ok && bad == 0 && rep.violations == 0 && std::fabs(rep.members.empty() ? 0 : rep.min_eta_G - min_eta) == 0;
    };
    std::vector<Graph> kn;
    for (int n = 2; n <= 30; ++n) kn.push_back(Graph::complete(n));
    check(kn, "K_n");
    std::vector<Graph> sl;
    for (double t : {8.0, 16.0}) sl.push_back(sl2z_level(t, substream(88, "level", static_cast<std::uint64_t>(t))).graph.union_graph());
    check(sl, "sl2z");
    return ok;
  });

  run(9, "determinism", [&](std::ostringstream& out) {
    if (!have_sl2z) throw std::runtime_error("sl2z family did not run");
    sl2z_b = family("sl2z.cfg", "sl2z_b.csv");
    have_b = true;
    const std::string a = slurp(work / "sl2z_a.csv"), b = slurp(work / "sl2z_b.csv");
    out << a.size() << " bytes, " << (a == b ? "identical" : "different");
    return !a.empty() && a == b;
  });
  (void)have_b;

  std::printf("%s: %d criterion failure(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
