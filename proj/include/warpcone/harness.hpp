#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "warpcone/io.hpp"
#include "warpcone/spectra.hpp"
#include "warpcone/warp_graph.hpp"

namespace warpcone {

struct ExperimentConfig {
  std::string name = "family";
  std::string space = "t2";
  std::string action = "sl2z";  // built-in name or action file
  std::vector<double> levels{8, 12, 16, 24, 32};
  std::uint64_t seed = 1;
  double net_streak_factor = 200.0;
  int samples_per_cell = 200;
  int measure_samples_per_cell = 400;  // measure estimate uses this times #Z samples
  std::vector<double> p_list{1, 2, 4};
  int restarts = 8;
  std::string variant = "full";
  std::string output_dir = "out";
  int ahlfors_centers = 16;
  int ahlfors_samples = 100000;
  double ahlfors_rmin = 0.02;
  int ahlfors_radii = 10;
  int bilipschitz_pairs = 0;
  int rho = 8;
  int workers = 1;
  int max_net_size = 0;  // 0: no cap; a larger net aborts the level

  /// Directory that relative action paths are resolved against; not
  /// serialized.
  std::string base_dir;

  void validate() const;
  std::string serialize() const;
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);
  bool operator==(const ExperimentConfig& other) const;
};

enum class Verdict { kExpanderConsistent, kNonExpanderConsistent, kInconclusive };
std::string to_string(Verdict v);

/// Thresholds of the family classification. They are run policy, echoed
/// into every CSV header.
struct VerdictPolicy {
  double min_growth = 16.0;        // #Z(last) / #Z(first) for an expander verdict
  double min_eta_ratio = 0.5;      // min eta / max eta
  double min_kappa_ratio = 0.5;    // min kappa / max kappa
  double min_decay = 4.0;          // eta(first) / eta(last) for a non-expander verdict
  std::vector<std::string> describe() const;
};

struct TrendStats {
  double size_growth = 0.0;
  double eta_min = 0.0, eta_max = 0.0;
  double eta_ratio = 0.0;  // min / max
  double eta_decay = 0.0;  // first / last
  bool eta_nonincreasing = false;
  double kappa_min = 0.0, kappa_max = 0.0;
};

struct LevelDiagnostics {
  double t = 0.0;
  int net_size = 0;
  double min_separation = 0.0;
  std::int64_t density_violations = 0;
  DegreeReport degrees;
  int bilipschitz_violations = 0;
  int bilipschitz_pairs = 0;
  std::vector<std::string> warnings;
};

struct FamilyVerdict {
  std::vector<double> p_list;
  std::vector<SpectralReport> rows;
  std::vector<LevelDiagnostics> levels;
  TrendStats stats;
  Verdict verdict = Verdict::kInconclusive;
  std::vector<std::string> violations;
};

TrendStats trend_stats(const std::vector<SpectralReport>& rows);
Verdict classify(const TrendStats& stats, const VerdictPolicy& policy = {});
/// Rebuilds the trend part of a verdict from stored rows.
FamilyVerdict verdict_from_table(const ReportTable& table, const VerdictPolicy& policy = {});

/// Per level: net, cell measures, graph, spectra, invariant checks; one CSV
/// row per finished level. Throws on a failed level, leaving the rows
/// written so far in place.
FamilyVerdict run_family(const ExperimentConfig& config, const std::string& csv_path, std::ostream* log = nullptr,
                         const VerdictPolicy& policy = {});

/// Tab-separated series (t, value): eta_p<p>.tsv per p, kappa_hat.tsv,
/// n_vertices.tsv and fwd_margin.tsv (the last only when eta was requested).
std::vector<std::string> emit_plots(const FamilyVerdict& verdict, const std::string& out_dir);

}  // namespace warpcone
