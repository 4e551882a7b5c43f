#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "warpcone/eta.hpp"
#include "warpcone/harness.hpp"
#include "warpcone/io.hpp"
#include "warpcone/net.hpp"
#include "warpcone/qi.hpp"
#include "warpcone/rng.hpp"
#include "warpcone/spectra.hpp"
#include "warpcone/warp_graph.hpp"

using namespace warpcone;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int run_family_cmd(const std::string& config_path, const std::string& out_override, bool plots) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const std::string csv = cfg.output_dir + "/" + cfg.name + ".csv";
  const FamilyVerdict v = run_family(cfg, csv, &std::cerr);
  if (plots && v.rows.size() >= 2) emit_plots(v, cfg.output_dir + "/plots");
  std::cout << "verdict: " << to_string(v.verdict) << "\n"
            << "size_growth=" << format_double(v.stats.size_growth) << " eta_ratio=" << format_double(v.stats.eta_ratio)
            << " eta_decay=" << format_double(v.stats.eta_decay) << " kappa_min=" << format_double(v.stats.kappa_min)
            << " kappa_max=" << format_double(v.stats.kappa_max) << "\n"
            << "csv: " << csv << "\n";
  for (const auto& s : v.violations) std::cout << "violation: " << s << "\n";
  return v.violations.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warped-cone graph families: nets, graphs, spectra and quasi-isometry checks"};
  app.require_subcommand(0, 1);
  std::string top_config;
  app.add_option("--config", top_config, "Run the family described by this configuration file");

  // net
  auto* net_cmd = app.add_subcommand("net", "Build a 1/t-separated net and estimate cell measures");
  std::string net_space = "t2", net_out;
  double net_t = 16;
  std::uint64_t net_seed = 1;
  std::int64_t net_samples = 0;
  net_cmd->add_option("--space", net_space, "t2, circle or t<d>");
  net_cmd->add_option("--t", net_t, "Level t >= 1")->required();
  net_cmd->add_option("--seed", net_seed);
  net_cmd->add_option("--samples", net_samples, "Measure samples (default 400 per cell)");
  net_cmd->add_option("--out", net_out)->required();

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "Build the warped graph G(t) on a net");
  std::string g_net, g_action = "sl2z", g_variant = "full", g_out, g_dot;
  int g_samples = 200;
  std::uint64_t g_seed = 1;
  graph_cmd->add_option("--net", g_net)->required();
  graph_cmd->add_option("--action", g_action, "sl2z, rotation, identity or an action file");
  graph_cmd->add_option("--samples-per-cell", g_samples);
  graph_cmd->add_option("--variant", g_variant, "full or type1_only");
  graph_cmd->add_option("--seed", g_seed);
  graph_cmd->add_option("--out", g_out)->required();
  graph_cmd->add_option("--dot", g_dot, "Also write a DOT file");

  // spectrum
  auto* spec_cmd = app.add_subcommand("spectrum", "Spectral report for one level");
  std::string s_graph, s_net, s_p = "1,2,4", s_out;
  int s_restarts = 8;
  std::uint64_t s_seed = 1;
  double s_k = 0.0;
  spec_cmd->add_option("--graph", s_graph)->required();
  spec_cmd->add_option("--net", s_net)->required();
  spec_cmd->add_option("--p", s_p, "Comma-separated exponents");
  spec_cmd->add_option("--restarts", s_restarts);
  spec_cmd->add_option("--seed", s_seed);
  spec_cmd->add_option("--k-hat", s_k, "Use this K instead of estimating it");
  spec_cmd->add_option("--out", s_out)->required();

  // qi-check
  auto* qi_cmd = app.add_subcommand("qi-check", "Subdivision quasi-isometry transfer check at p = 1");
  std::string q_graphs, q_out;
  int q_k = 1;
  std::uint64_t q_seed = 1;
  qi_cmd->add_option("--graphs", q_graphs, "Comma-separated graph files")->required();
  qi_cmd->add_option("--subdivide", q_k);
  qi_cmd->add_option("--seed", q_seed);
  qi_cmd->add_option("--out", q_out)->required();

  // family
  auto* fam_cmd = app.add_subcommand("family", "Run a level sweep and classify the family");
  std::string f_config, f_out;
  bool f_plots = false;
  fam_cmd->add_option("--config", f_config)->required();
  fam_cmd->add_option("--out", f_out, "Override the output directory");
  fam_cmd->add_flag("--plots", f_plots, "Also write plot series");

  // plots
  auto* plot_cmd = app.add_subcommand("plots", "Plot series from a family CSV");
  std::string p_csv, p_out;
  plot_cmd->add_option("--csv", p_csv)->required();
  plot_cmd->add_option("--out", p_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(net_cmd)) {
      auto space = make_space(net_space);
      Net net = build_net(space, net_t, substream(net_seed, "net"));
      const std::int64_t n = net_samples > 0 ? net_samples : 400LL * net.size();
      net.attach_measures(estimate_cell_measures(net, n, substream(net_seed, "measures")));
      save_net(net_out, net);
      for (const auto& w : net.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& w : net.measure_info().warnings) std::cerr << "warning: " << w << "\n";
      const auto dens = check_density(net, 20LL * net.size(), substream(net_seed, "density"));
      const bool ok = (net.size() == 1 || net.min_separation() >= (1.0 / net_t) * (1.0 - 1e-12)) && dens.violations == 0;
      std::cout << "net: " << net.size() << " points, min separation " << format_double(net.min_separation())
                << ", max owner distance " << format_double(dens.max_owner_distance) << "\n";
      return ok ? 0 : 1;
    }
    if (app.got_subcommand(graph_cmd)) {
      const Net net = load_net(g_net);
      const Action action = load_action(g_action, net.space().name());
      GraphBuildOptions o;
      o.n_per_cell = g_samples;
      o.variant = parse_variant(g_variant);
      const WarpedGraph g = build_graph(net, action, substream(g_seed, "edges"), o);
      save_graph(g_out, g);
      if (!g_dot.empty()) {
        std::ofstream f(g_dot);
        write_dot(f, g);
      }
      for (const auto& w : g.warnings) std::cerr << "warning: " << w << "\n";
      const auto ahl = verify_ahlfors(net.space(), 16, default_ahlfors_radii(net.space(), 0.02), 100000, substream(g_seed, "ahlfors"));
      const auto deg = degree_report(g, ahl, action);
      std::cout << "graph: " << g.num_vertices() << " vertices, " << g.union_graph().num_edges() << " edges, max degree "
                << deg.max_total << " (bound " << format_double(deg.bound_total) << ")\n";
      return deg.violation ? 1 : 0;
    }
    if (app.got_subcommand(spec_cmd)) {
      const Net net = load_net(s_net);
      if (!net.has_measures()) throw InputError("net file carries no cell measures");
      const WarpedGraph g = load_graph(s_graph, net.cell_measures());
      double K = s_k;
      if (!(K > 0.0))
        K = verify_ahlfors(net.space(), 16, default_ahlfors_radii(net.space(), 0.02), 100000, substream(s_seed, "ahlfors")).K();
      SpectrumOptions o;
      o.p_list = parse_double_list(s_p);
      o.restarts = s_restarts;
      o.seed = s_seed;
      const SpectralReport r = analyze_level(g, K, o);
      std::ofstream f(s_out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + s_out);
      write_report_header(f, o.p_list);
      write_report_row(f, r, o.p_list);
      write_report_row(std::cout, r, o.p_list);
      bool ok = r.markov_norm <= 1.0 + 1e-12 && ((r.markov_norm_lazy < 1.0 - 1e-9) == (r.kappa_hat > 1e-9)) &&
                std::fabs(r.eta_value(2.0) - r.lambda2 / 2.0) <= 1e-6 * std::max(1.0, r.lambda2) && r.fwd_margin >= -0.01;
      return ok ? 0 : 1;
    }
    if (app.got_subcommand(qi_cmd)) {
      std::vector<Graph> family;
      for (const auto& path : split_list(q_graphs)) family.push_back(load_graph(path).union_graph());
      EtaOptions eo;
      eo.seed = q_seed;
      const QIReport rep = qi_invariance_check(family, q_k, eo);
      std::ofstream f(q_out, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write " + q_out);
      f << "# C=" << format_double(rep.params.C) << " A=" << format_double(rep.params.A) << " B=" << format_double(rep.params.B)
        << " D=" << rep.params.D << " min_eta_G=" << format_double(rep.min_eta_G) << "\n";
      f << "member,n_vertices,n_subdivided,eta_G,eta_H,bound,margin,qi_violations\n";
      for (std::size_t i = 0; i < rep.members.size(); ++i) {
        const auto& m = rep.members[i];
        f << i << ',' << m.n_vertices << ',' << m.n_vertices_subdivided << ',' << format_double(m.eta_G) << ','
          << format_double(m.eta_H) << ',' << format_double(m.bound) << ',' << format_double(m.margin) << ','
          << m.qi_violations << '\n';
      }
      std::cout << "qi-check: " << rep.members.size() << " member(s), " << rep.violations << " violation(s)\n";
      return rep.violations == 0 ? 0 : 1;
    }
    if (app.got_subcommand(fam_cmd)) return run_family_cmd(f_config, f_out, f_plots);
    if (app.got_subcommand(plot_cmd)) {
      std::ifstream f(p_csv);
      if (!f) throw std::runtime_error("cannot read " + p_csv);
      const FamilyVerdict v = verdict_from_table(read_report_csv(f));
      for (const auto& path : emit_plots(v, p_out)) std::cout << path << "\n";
      return 0;
    }
    if (!top_config.empty()) return run_family_cmd(top_config, "", true);
    std::cout << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
