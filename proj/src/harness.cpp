#include "warpcone/harness.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "warpcone/distance_field.hpp"
#include "warpcone/net.hpp"
#include "warpcone/rng.hpp"
#include "warpcone/types.hpp"

namespace warpcone {
namespace fs = std::filesystem;

namespace {

std::uint64_t level_key(double t) { return std::bit_cast<std::uint64_t>(t); }

int to_int(const std::string& key, const std::string& v) {
  const double d = parse_double(v);
  if (d != std::floor(d) || std::fabs(d) > 2e9) throw ConfigError(key + " must be an integer");
  return static_cast<int>(d);
}

}  // namespace

void ExperimentConfig::validate() const {
  make_space(space);
  if (levels.empty()) throw ConfigError("level grid is empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 1.0) || !std::isfinite(levels[i])) throw ConfigError("levels must be finite and >= 1");
    if (i && !(levels[i] > levels[i - 1])) throw ConfigError("levels must be strictly increasing");
  }
  if (!(net_streak_factor > 0.0)) throw ConfigError("net_streak_factor must be positive");
  if (samples_per_cell < 30) throw ConfigError("samples_per_cell must be >= 30");
  if (measure_samples_per_cell < 10) throw ConfigError("measure_samples_per_cell must be >= 10");
  for (double p : p_list)
    if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("p values must lie in [1, inf)");
  if (restarts < 0) throw ConfigError("restarts must be >= 0");
  try {
    parse_variant(variant);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (ahlfors_centers < 1 || ahlfors_samples < 1 || ahlfors_radii < 2 || !(ahlfors_rmin > 0.0))
    throw ConfigError("Ahlfors budgets must be positive");
  if (bilipschitz_pairs < 0) throw ConfigError("bilipschitz_pairs must be >= 0");
  if (rho < 4) throw ConfigError("rho must be >= 4");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (max_net_size < 0) throw ConfigError("max_net_size must be >= 0");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "name = " << name << '\n'
     << "space = " << space << '\n'
     << "action = " << action << '\n'
     << "levels = " << join_doubles(levels) << '\n'
     << "seed = " << seed << '\n'
     << "net_streak_factor = " << format_double(net_streak_factor) << '\n'
     << "samples_per_cell = " << samples_per_cell << '\n'
     << "measure_samples_per_cell = " << measure_samples_per_cell << '\n'
     << "p_list = " << join_doubles(p_list) << '\n'
     << "restarts = " << restarts << '\n'
     << "variant = " << variant << '\n'
     << "output_dir = " << output_dir << '\n'
     << "ahlfors_centers = " << ahlfors_centers << '\n'
     << "ahlfors_samples = " << ahlfors_samples << '\n'
     << "ahlfors_rmin = " << format_double(ahlfors_rmin) << '\n'
     << "ahlfors_radii = " << ahlfors_radii << '\n'
     << "bilipschitz_pairs = " << bilipschitz_pairs << '\n'
     << "rho = " << rho << '\n'
     << "workers = " << workers << '\n'
     << "max_net_size = " << max_net_size << '\n';
  return os.str();
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig c;
  std::map<std::string, int> seen;
  for (const auto& kv : read_key_values(in)) {
    if (seen[kv.key]++) throw ConfigError("duplicate key '" + kv.key + "'");
    const auto& k = kv.key;
    const auto& v = kv.value;
    if (k == "name") c.name = v;
    else if (k == "space") c.space = v;
    else if (k == "action") c.action = v;
    else if (k == "levels") c.levels = parse_double_list(v);
    else if (k == "seed") {
      try {
        std::size_t used = 0;
        if (v.empty() || !std::isdigit(static_cast<unsigned char>(v[0]))) throw ConfigError("seed must be a non-negative integer");
        c.seed = std::stoull(v, &used);
        if (used != v.size()) throw ConfigError("bad seed");
      } catch (const std::logic_error&) {
        throw ConfigError("seed must be a non-negative integer");
      }
    }
    else if (k == "net_streak_factor") c.net_streak_factor = parse_double(v);
    else if (k == "samples_per_cell") c.samples_per_cell = to_int(k, v);
    else if (k == "measure_samples_per_cell") c.measure_samples_per_cell = to_int(k, v);
    else if (k == "p_list") c.p_list = parse_double_list(v);
    else if (k == "restarts") c.restarts = to_int(k, v);
    else if (k == "variant") c.variant = v;
    else if (k == "output_dir") c.output_dir = v;
    else if (k == "ahlfors_centers") c.ahlfors_centers = to_int(k, v);
    else if (k == "ahlfors_samples") c.ahlfors_samples = to_int(k, v);
    else if (k == "ahlfors_rmin") c.ahlfors_rmin = parse_double(v);
    else if (k == "ahlfors_radii") c.ahlfors_radii = to_int(k, v);
    else if (k == "bilipschitz_pairs") c.bilipschitz_pairs = to_int(k, v);
    else if (k == "rho") c.rho = to_int(k, v);
    else if (k == "workers") c.workers = to_int(k, v);
    else if (k == "max_net_size") c.max_net_size = to_int(k, v);
    else throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + k + "'");
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  ExperimentConfig c = parse(f);
  c.base_dir = fs::path(path).parent_path().string();
  return c;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const { return serialize() == o.serialize(); }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kExpanderConsistent:
      return "expander-consistent";
    case Verdict::kNonExpanderConsistent:
      return "non-expander-consistent";
    default:
      return "inconclusive";
  }
}

std::vector<std::string> VerdictPolicy::describe() const {
  return {
      "policy: expander-consistent if n_vertices grows >= " + format_double(min_growth) +
          "x over the grid, min eta_p2 >= " + format_double(min_eta_ratio) + " * max eta_p2 and min kappa_hat >= " +
          format_double(min_kappa_ratio) + " * max kappa_hat",
      "policy: non-expander-consistent if eta_p2 is non-increasing in t and eta_p2(first) / eta_p2(last) >= " +
          format_double(min_decay),
      "policy: otherwise inconclusive; thresholds are run policy; any strictly increasing level grid is accepted",
  };
}

TrendStats trend_stats(const std::vector<SpectralReport>& rows) {
  TrendStats s;
  if (rows.empty()) return s;
  s.size_growth = static_cast<double>(rows.back().n_vertices) / std::max(1, rows.front().n_vertices);
  s.eta_min = s.kappa_min = std::numeric_limits<double>::infinity();
  s.eta_max = s.kappa_max = -std::numeric_limits<double>::infinity();
  s.eta_nonincreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.kappa_min = std::min(s.kappa_min, rows[i].kappa_hat);
    s.kappa_max = std::max(s.kappa_max, rows[i].kappa_hat);
    const double e = rows[i].eta_value(2.0, 1);
    if (std::isnan(e)) s.eta_min = s.eta_max = e;  // sticks; classify reads it as missing
    if (std::isnan(s.eta_min)) continue;
    s.eta_min = std::min(s.eta_min, e);
    s.eta_max = std::max(s.eta_max, e);
    if (i && !(e <= rows[i - 1].eta_value(2.0, 1) * (1.0 + 1e-9))) s.eta_nonincreasing = false;
  }
  s.eta_ratio = s.eta_max > 0.0 ? s.eta_min / s.eta_max : 0.0;
  const double first = rows.front().eta_value(2.0, 1), last = rows.back().eta_value(2.0, 1);
  s.eta_decay = last > 0.0 ? first / last : std::numeric_limits<double>::infinity();
  return s;
}

Verdict classify(const TrendStats& s, const VerdictPolicy& p) {
  if (std::isnan(s.eta_min) || std::isnan(s.eta_max)) return Verdict::kInconclusive;
  if (s.size_growth >= p.min_growth && s.eta_max > 0.0 && s.eta_ratio >= p.min_eta_ratio && s.kappa_max > 0.0 &&
      s.kappa_min >= p.min_kappa_ratio * s.kappa_max)
    return Verdict::kExpanderConsistent;
  if (s.eta_nonincreasing && s.eta_decay >= p.min_decay) return Verdict::kNonExpanderConsistent;
  return Verdict::kInconclusive;
}

FamilyVerdict verdict_from_table(const ReportTable& table, const VerdictPolicy& policy) {
  FamilyVerdict v;
  v.p_list = table.p_list;
  v.rows = table.rows;
  v.stats = trend_stats(v.rows);
  v.verdict = classify(v.stats, policy);
  return v;
}

FamilyVerdict run_family(const ExperimentConfig& config, const std::string& csv_path, std::ostream* log,
                         const VerdictPolicy& policy) {
  config.validate();
  auto space = make_space(config.space);
  std::string action_spec = config.action;
  if (action_spec != "sl2z" && action_spec != "rotation" && action_spec != "identity" && !config.base_dir.empty() &&
      fs::path(action_spec).is_relative())
    action_spec = (fs::path(config.base_dir) / action_spec).string();
  const Action action = load_action(action_spec, config.space);

  const auto radii = default_ahlfors_radii(*space, config.ahlfors_rmin, config.ahlfors_radii);
  const AhlforsEstimate ahl =
      verify_ahlfors(*space, config.ahlfors_centers, radii, config.ahlfors_samples, substream(config.seed, "ahlfors"));
  const double K = ahl.K();

  FamilyVerdict out;
  out.p_list = config.p_list;

  if (!csv_path.empty() && fs::path(csv_path).has_parent_path()) fs::create_directories(fs::path(csv_path).parent_path());
  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    std::vector<std::string> comments = policy.describe();
    std::istringstream cfg(config.serialize());
    for (std::string line; std::getline(cfg, line);) comments.push_back("config: " + line);
    comments.push_back("ahlfors: c=" + format_double(ahl.c) + " m=" + format_double(ahl.m) + " C=" + format_double(ahl.C) +
                       " K=" + format_double(K));
    write_report_header(csv, config.p_list, comments);
    csv.flush();
  }

  const GraphBuildOptions gopts{config.samples_per_cell, parse_variant(config.variant), 1000, config.workers};
  for (double t : config.levels) {
    const std::uint64_t key = level_key(t);
    LevelDiagnostics diag;
    diag.t = t;
    SpectralReport row;
    try {
      NetOptions nopts;
      nopts.streak_factor = config.net_streak_factor;
      Net net = build_net(space, t, substream(config.seed, "net", key), nopts);
      if (config.max_net_size > 0 && net.size() > config.max_net_size)
        throw InputError("net has " + std::to_string(net.size()) + " points, above max_net_size");
      const std::int64_t n_meas = static_cast<std::int64_t>(config.measure_samples_per_cell) * net.size();
      net.attach_measures(estimate_cell_measures(net, n_meas, substream(config.seed, "measures", key), config.workers));
      diag.net_size = net.size();
      diag.min_separation = net.min_separation();
      diag.warnings = net.warnings;
      for (const auto& w : net.measure_info().warnings) diag.warnings.push_back(w);
      diag.density_violations = check_density(net, 20LL * net.size(), substream(config.seed, "density", key)).violations;

      const WarpedGraph graph = build_graph(net, action, substream(config.seed, "edges", key), gopts);
      for (const auto& w : graph.warnings) diag.warnings.push_back(w);
      diag.degrees = degree_report(graph, ahl, action);

      SpectrumOptions sopts;
      sopts.p_list = config.p_list;
      sopts.restarts = config.restarts;
      sopts.seed = substream(config.seed, "optimizer", key);
      row = analyze_level(graph, K, sopts);

      if (config.bilipschitz_pairs > 0) {
        const WarpedDistanceField field(action, t, config.rho);
        const auto bl = bilipschitz_check(graph, net, field, config.bilipschitz_pairs, substream(config.seed, "bilipschitz", key));
        diag.bilipschitz_pairs = bl.n_pairs;
        diag.bilipschitz_violations = bl.violations;
      }

      // Invariants of this level.
      auto fail = [&](const std::string& what) { out.violations.push_back("t=" + format_double(t) + ": " + what); };
      if (net.size() > 1 && diag.min_separation < (1.0 / t) * (1.0 - 1e-12)) fail("net separation below 1/t");
      if (diag.density_violations > 0) fail("net density certificate failed");
      const auto mu = net.cell_measures();
      const double cell_tol = 5.0 / std::sqrt(static_cast<double>(config.measure_samples_per_cell));
      for (double m : mu)
        if (m < (1.0 - cell_tol) / (K * net.size()) || m > (1.0 + cell_tol) * K / net.size()) {
          fail("cell measure outside the K bounds");
          break;
        }
      if (diag.degrees.violation) fail("degree bound exceeded");
      if (row.markov_norm > 1.0 + 1e-12) fail("markov norm above 1");
      if ((row.markov_norm_lazy < 1.0 - 1e-9) != (row.kappa_hat > 1e-9)) fail("markov gap and kappa_hat disagree");
      const double eta2 = row.eta_value(2.0, 1);
      if (std::fabs(eta2 - row.lambda2 / 2.0) > 1e-6 * std::max(1.0, row.lambda2)) fail("eta(2,1) differs from lambda2/2");
      if (row.fwd_margin < -0.01) fail("forward inequality margin below -0.01");
      if (diag.bilipschitz_violations > 0) fail("bi-Lipschitz comparison violated");
    } catch (const std::exception& e) {
      throw std::runtime_error("level t=" + format_double(t) + " failed: " + e.what());
    }

    if (csv.is_open()) {
      write_report_row(csv, row, config.p_list);
      csv.flush();
    }
    if (log) {
      *log << "t=" << format_double(t) << " n=" << row.n_vertices << " lambda2=" << row.lambda2
           << " eta2=" << row.eta_value(2.0, 1) << " kappa=" << row.kappa_hat << " markov=" << row.markov_norm
           << " D=" << row.D_max << " fwd_margin=" << row.fwd_margin << '\n';
      for (const auto& w : diag.warnings) *log << "  warning: " << w << '\n';
    }
    out.rows.push_back(std::move(row));
    out.levels.push_back(std::move(diag));
  }

  out.stats = trend_stats(out.rows);
  out.verdict = classify(out.stats, policy);
  if (csv.is_open()) {
    csv << "# verdict: " << to_string(out.verdict) << '\n';
    csv.flush();
  }
  return out;
}

std::vector<std::string> emit_plots(const FamilyVerdict& v, const std::string& out_dir) {
  if (v.rows.size() < 2) throw InputError("plots need at least two levels");
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  auto series = [&](const std::string& file, const std::string& column, auto value) {
    const std::string path = (fs::path(out_dir) / file).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "t\t" << column << '\n';
    for (const auto& r : v.rows) f << format_double(r.t) << '\t' << value(r) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
    written.push_back(path);
  };
  for (double p : v.p_list) {
    const std::string col = "eta_p" + format_double(p);
    series(col + ".tsv", col, [p](const SpectralReport& r) { return format_double(r.eta_value(p, 1)); });
  }
  series("kappa_hat.tsv", "kappa_hat", [](const SpectralReport& r) { return format_double(r.kappa_hat); });
  series("n_vertices.tsv", "n_vertices", [](const SpectralReport& r) { return std::to_string(r.n_vertices); });
  if (!v.p_list.empty())
    series("fwd_margin.tsv", "fwd_margin", [](const SpectralReport& r) { return format_double(r.fwd_margin); });
  return written;
}

}  // namespace warpcone
