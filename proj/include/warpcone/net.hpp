#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "warpcone/grid_index.hpp"
#include "warpcone/space.hpp"

namespace warpcone {

struct NetOptions {
  /// Stop once this many consecutive candidates were rejected, times #Z.
  double streak_factor = 200.0;
  /// Lower bound on the streak, so that tiny nets are not under-sampled.
  std::int64_t min_streak = 200;
  /// Hard cap on candidates drawn by the greedy phase.
  std::int64_t max_candidates = 200'000'000;
  /// Sweep a lattice finer than 1/t after the random phase and insert every
  /// lattice point still uncovered.
  bool lattice_completion = true;
  /// Samples used for the density certificate, times #Z.
  int density_check_factor = 20;
};

/// Per-cell measure estimates mu(U_z) and the sampling metadata behind them.
struct CellMeasures {
  std::vector<double> values;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  bool smoothed = false;
  std::vector<std::string> warnings;
};

struct DensityReport {
  double max_owner_distance = 0.0;  // sup over samples of d(x, owner(x))
  std::int64_t violations = 0;      // samples farther than 1/t from every net point
  std::int64_t n_samples = 0;
};

/// A 1/t-separated point set Z with its Voronoi partition {U_z}.
class Net {
 public:
  /// Wraps an explicit point set; separation is not enforced here (see
  /// min_separation()).
  Net(std::shared_ptr<const Space> space, double t, std::vector<Point> points, std::uint64_t seed = 0);

  const Space& space() const { return *space_; }
  const std::shared_ptr<const Space>& space_ptr() const { return space_; }
  double t() const { return t_; }
  int size() const { return static_cast<int>(points_.size()); }
  const std::vector<Point>& points() const { return points_; }
  const Point& point(VertexId z) const { return points_.at(static_cast<std::size_t>(z)); }
  std::uint64_t seed() const { return seed_; }
  const GridIndex& index() const { return index_; }

  /// Voronoi owner: argmin_z d(x, z), lowest id on ties.
  VertexId assign_cell(const Point& x) const;

  bool has_measures() const { return !measures_.values.empty(); }
  std::span<const double> cell_measures() const { return measures_.values; }
  const CellMeasures& measure_info() const { return measures_; }
  void attach_measures(CellMeasures m);

  /// Exact minimum pairwise distance (infinity for a single point).
  double min_separation() const;

  std::vector<std::string> warnings;

 private:
  std::shared_ptr<const Space> space_;
  double t_;
  std::vector<Point> points_;
  std::uint64_t seed_;
  GridIndex index_;
  CellMeasures measures_;
};

/// Greedy maximal 1/t-separated net: uniform candidates are kept iff they are
/// at least 1/t from every kept point, until a rejection streak of
/// max(min_streak, streak_factor * #Z) candidates.
Net build_net(std::shared_ptr<const Space> space, double t, std::uint64_t seed, const NetOptions& options = {});

inline VertexId assign_cell(const Net& net, const Point& x) { return net.assign_cell(x); }

/// Empirical frequencies of n uniform samples routed through assign_cell.
/// Zero-count cells trigger additive smoothing (count + 1) / (n + #Z).
/// The budget is split over `workers` independently seeded chunks.
CellMeasures estimate_cell_measures(const Net& net, std::int64_t n, std::uint64_t seed, int workers = 1);

DensityReport check_density(const Net& net, std::int64_t n, std::uint64_t seed);

struct AhlforsSample {
  double radius = 0.0;
  double measure = 0.0;  // Monte-Carlo ball measure around one center
};

/// Ahlfors-regularity constants: c r^m <= mu(B(y, r)) <= c C r^m.
struct AhlforsEstimate {
  double c = 0.0;      // lower envelope, so the lower bound holds on every sample
  double m = 0.0;      // least-squares slope of log mu vs log r
  double C = 1.0;      // max mu / (c r^m), >= 1
  double c_fit = 0.0;  // least-squares intercept exp(b)
  double fit_residual = 0.0;
  std::vector<double> radii;
  std::vector<AhlforsSample> samples;
  std::vector<std::string> warnings;

  /// Cell-measure uniformity constant K = C 2^m.
  double K() const;
};

AhlforsEstimate verify_ahlfors(const Space& space, int n_centers, const std::vector<double>& radii, std::int64_t n,
                               std::uint64_t seed);

/// Geometric radius grid from r_min to the diameter.
std::vector<double> default_ahlfors_radii(const Space& space, double r_min, int count = 10);

}  // namespace warpcone
