#include "warpcone/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace warpcone {

namespace {

// Points of the torus farther than sep from every net point are found
// exactly: on the circle at midpoints of long gaps, on T^2 at Voronoi
// vertices (circumcenters of nearby triples), where the distance to the net
// peaks. Any such point is inserted, which keeps the separation.
int repair_coverage(const Space& space, GridIndex& index, std::vector<Point>& kept, double sep) {
  int added = 0;
  auto add = [&](const Point& x) {
    index.insert(static_cast<VertexId>(kept.size()), x);
    kept.push_back(x);
    ++added;
  };
  if (space.dim() == 1) {
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<double> xs;
      for (const auto& p : kept) xs.push_back(p[0]);
      std::sort(xs.begin(), xs.end());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double a = xs[i];
        double gap = (i + 1 < xs.size() ? xs[i + 1] : xs[0] + 1.0) - a;
        if (gap <= 0.0) gap += 1.0;
        if (gap <= 2.0 * sep) continue;
        const Point mid{wrap_unit(a + 0.5 * gap)};
        double d = 0.0;
        index.nearest(mid, &d);
        if (d > sep) {
          add(mid);
          changed = true;
        }
      }
    }
    return added;
  }
  if (space.dim() != 2) return 0;

  // After lattice completion the covering radius is below 1.09 sep, so the
  // three nearest points of any Voronoi vertex lie within 2.25 sep of each other.
  const double R = 2.25 * sep;
  struct Image {
    double x, y;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const Point pi = kept[i];
      std::vector<Image> near;
      if (R < 0.5) {
        index.for_each_within(pi, R, [&](VertexId j, double) {
          if (static_cast<std::size_t>(j) == i) return;
          const Point& q = index.point(j);
          near.push_back({wrapped_delta(q[0] - pi[0]), wrapped_delta(q[1] - pi[1])});
        });
      } else {
        const int K = static_cast<int>(std::floor(R + 1.0));
        for (std::size_t j = 0; j < kept.size(); ++j)
          for (int sx = -K; sx <= K; ++sx)
            for (int sy = -K; sy <= K; ++sy) {
              if (j == i && sx == 0 && sy == 0) continue;
              const double dx = kept[j][0] + sx - pi[0], dy = kept[j][1] + sy - pi[1];
              if (dx * dx + dy * dy <= R * R) near.push_back({dx, dy});
            }
      }
      for (std::size_t a = 0; a < near.size(); ++a)
        for (std::size_t b = a + 1; b < near.size(); ++b) {
          const Image& u = near[a];
          const Image& v = near[b];
          const double D = 2.0 * (u.x * v.y - u.y * v.x);
          if (std::fabs(D) < 1e-14) continue;
          const double nu = u.x * u.x + u.y * u.y, nv = v.x * v.x + v.y * v.y;
          const double cx = (v.y * nu - u.y * nv) / D, cy = (u.x * nv - v.x * nu) / D;
          if (cx * cx + cy * cy <= sep * sep) continue;
          const Point c{wrap_unit(pi[0] + cx), wrap_unit(pi[1] + cy)};
          double d = 0.0;
          index.nearest(c, &d);
          if (d > sep) {
            add(c);
            changed = true;
          }
        }
    }
  }
  return added;
}

}  // namespace

Net::Net(std::shared_ptr<const Space> space, double t, std::vector<Point> points, std::uint64_t seed)
    : space_(std::move(space)), t_(t), points_(std::move(points)), seed_(seed) {
  if (!space_) throw InputError("net needs a space");
  if (!(t_ > 0.0)) throw InputError("level t must be positive");
  if (points_.empty()) throw InputError("net needs at least one point");
  index_ = GridIndex(space_.get(), 1.0 / t_);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    points_[i] = space_->wrap(points_[i]);
    index_.insert(static_cast<VertexId>(i), points_[i]);
  }
}

VertexId Net::assign_cell(const Point& x) const { return index_.nearest(x); }

void Net::attach_measures(CellMeasures m) {
  if (m.values.size() != points_.size()) throw InputError("cell measure count does not match net size");
  measures_ = std::move(m);
}

double Net::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j) best = std::min(best, space_->distance(points_[i], points_[j]));
  return best;
}

Net build_net(std::shared_ptr<const Space> space, double t, std::uint64_t seed, const NetOptions& options) {
  if (!space) throw InputError("net needs a space");
  if (!(t >= 1.0)) throw InputError("level t must be >= 1");
  const double sep = 1.0 / t;
  Rng rng(substream(seed, "net"));

  GridIndex index(space.get(), sep);
  std::vector<Point> kept;
  std::int64_t streak = 0;
  std::int64_t drawn = 0;
  bool budget_exhausted = false;
  while (true) {
    const auto needed = std::max<std::int64_t>(options.min_streak,
                                               static_cast<std::int64_t>(options.streak_factor * static_cast<double>(kept.size())));
    if (streak >= needed) break;
    if (drawn >= options.max_candidates) {
      budget_exhausted = true;
      break;
    }
    const Point x = space->sample(rng);
    ++drawn;
    if (index.any_closer_than(x, sep)) {
      ++streak;
      continue;
    }
    index.insert(static_cast<VertexId>(kept.size()), x);
    kept.push_back(x);
    streak = 0;
  }

  const int d = space->dim();
  if (options.lattice_completion && d <= 3) {
    const int per_dim = static_cast<int>(std::ceil((d <= 2 ? 8.0 : 4.0) * t));
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    while (true) {
      Point x(d);
      for (int i = 0; i < d; ++i) x[i] = (idx[static_cast<std::size_t>(i)] + 0.5) / per_dim;
      if (!index.any_closer_than(x, sep)) {
        index.insert(static_cast<VertexId>(kept.size()), x);
        kept.push_back(x);
      }
      int k = 0;
      while (k < d && ++idx[static_cast<std::size_t>(k)] == per_dim) idx[static_cast<std::size_t>(k++)] = 0;
      if (k == d) break;
    }
    if (dynamic_cast<const FlatTorus*>(space.get())) repair_coverage(*space, index, kept, sep);
  }

  Net net(space, t, std::move(kept), seed);
  if (budget_exhausted) {
    std::ostringstream os;
    os << "candidate budget exhausted after " << drawn << " draws before the rejection streak";
    net.warnings.push_back(os.str());
  }
  const DensityReport density =
      check_density(net, static_cast<std::int64_t>(options.density_check_factor) * net.size(), substream(seed, "density"));
  if (density.violations > 0) {
    std::ostringstream os;
    os << "density certificate failed: " << density.violations << " of " << density.n_samples
       << " samples farther than 1/t; achieved density " << density.max_owner_distance;
    net.warnings.push_back(os.str());
  }
  return net;
}

DensityReport check_density(const Net& net, std::int64_t n, std::uint64_t seed) {
  DensityReport report;
  report.n_samples = n;
  Rng rng(seed);
  const double radius = 1.0 / net.t();
  for (std::int64_t i = 0; i < n; ++i) {
    const Point x = net.space().sample(rng);
    double d = 0.0;
    net.index().nearest(x, &d);
    report.max_owner_distance = std::max(report.max_owner_distance, d);
    if (d > radius) ++report.violations;
  }
  return report;
}

CellMeasures estimate_cell_measures(const Net& net, std::int64_t n, std::uint64_t seed, int workers) {
  const auto nz = static_cast<std::int64_t>(net.size());
  if (n < 10 * nz) throw InputError("estimate_cell_measures needs n >= 10 * #Z");
  workers = std::max(1, workers);

  std::vector<std::vector<std::int64_t>> partial(static_cast<std::size_t>(workers), std::vector<std::int64_t>(static_cast<std::size_t>(nz), 0));
  auto run_chunk = [&](int w) {
    const std::int64_t begin = n * w / workers;
    const std::int64_t end = n * (w + 1) / workers;
    Rng rng(substream(seed, "cells", static_cast<std::uint64_t>(w)));
    auto& counts = partial[static_cast<std::size_t>(w)];
    for (std::int64_t i = begin; i < end; ++i) ++counts[static_cast<std::size_t>(net.assign_cell(net.space().sample(rng)))];
  };
  if (workers == 1) {
    run_chunk(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_chunk, w);
  }
  std::vector<std::int64_t> counts(static_cast<std::size_t>(nz), 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += p[i];

  CellMeasures out;
  out.n_samples = n;
  out.seed = seed;
  out.values.resize(counts.size());
  const auto empty = std::count(counts.begin(), counts.end(), 0);
  if (empty > 0) {
    out.smoothed = true;
    out.warnings.push_back(std::to_string(empty) + " cell(s) received no samples; additive smoothing applied");
    const double denom = static_cast<double>(n + nz);
    for (std::size_t i = 0; i < counts.size(); ++i) out.values[i] = static_cast<double>(counts[i] + 1) / denom;
  } else {
    for (std::size_t i = 0; i < counts.size(); ++i) out.values[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return out;
}

double AhlforsEstimate::K() const { return C * std::pow(2.0, m); }

std::vector<double> default_ahlfors_radii(const Space& space, double r_min, int count) {
  const double r_max = space.diameter();
  if (!(r_min > 0.0) || r_min >= r_max || count < 2) throw InputError("invalid Ahlfors radius range");
  std::vector<double> radii(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) radii[static_cast<std::size_t>(i)] = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (count - 1));
  radii.back() = r_max;
  return radii;
}

AhlforsEstimate verify_ahlfors(const Space& space, int n_centers, const std::vector<double>& radii, std::int64_t n,
                               std::uint64_t seed) {
  if (radii.size() < 2) throw InputError("verify_ahlfors needs at least 2 radii");
  if (n_centers < 1 || n < 1) throw InputError("verify_ahlfors needs positive sample sizes");
  for (double r : radii)
    if (!(r > 0.0) || r > space.diameter() * (1.0 + 1e-12)) throw InputError("radii must lie in (0, diameter]");

  AhlforsEstimate est;
  est.radii = radii;
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (int c = 0; c < n_centers; ++c) {
    Rng rng(substream(seed, "ahlfors", static_cast<std::uint64_t>(c)));
    const Point center = space.sample(rng);
    for (auto& d : dist) d = space.distance(center, space.sample(rng));
    std::sort(dist.begin(), dist.end());
    for (double r : sorted) {
      const auto hits = std::upper_bound(dist.begin(), dist.end(), r) - dist.begin();
      est.samples.push_back({r, static_cast<double>(hits) / static_cast<double>(n)});
    }
  }

  // Least squares on log mu = log c + m log r, over nonzero samples.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  int zeros = 0;
  for (const auto& s : est.samples) {
    if (s.measure <= 0.0) {
      ++zeros;
      continue;
    }
    const double x = std::log(s.radius), y = std::log(s.measure);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++k;
  }
  if (zeros > 0) est.warnings.push_back(std::to_string(zeros) + " ball sample(s) caught no points and were skipped");
  const double denom = k * sxx - sx * sx;
  if (k < 2 || std::fabs(denom) < 1e-300) throw InputError("verify_ahlfors needs at least two distinct radii with hits");
  est.m = (k * sxy - sx * sy) / denom;
  const double b = (sy - est.m * sx) / k;
  est.c_fit = std::exp(b);

  double ss = 0.0;
  est.c = std::numeric_limits<double>::infinity();
  for (const auto& s : est.samples) {
    if (s.measure <= 0.0) continue;
    const double resid = std::log(s.measure) - (b + est.m * std::log(s.radius));
    ss += resid * resid;
    est.c = std::min(est.c, s.measure / std::pow(s.radius, est.m));
  }
  est.fit_residual = std::sqrt(ss / k);
  est.C = 1.0;
  for (const auto& s : est.samples)
    if (s.measure > 0.0) est.C = std::max(est.C, s.measure / (est.c * std::pow(s.radius, est.m)));
  return est;
}

}  // namespace warpcone
