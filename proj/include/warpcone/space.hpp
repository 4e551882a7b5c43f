#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <string_view>

#include "warpcone/rng.hpp"
#include "warpcone/types.hpp"

namespace warpcone {

/// Compact geodesic metric space with a probability measure, charted on
/// [0,1)^d. Implementations are immutable and safe to share across threads.
class Space {
 public:
  virtual ~Space() = default;

  virtual int dim() const = 0;
  virtual double diameter() const = 0;
  virtual double distance(const Point& x, const Point& y) const = 0;
  /// Canonical representative of x in the chart.
  virtual Point wrap(Point x) const = 0;
  /// Draw from the (normalized) measure.
  virtual Point sample(Rng& rng) const = 0;
  virtual double total_measure() const { return 1.0; }
  /// Short identifier that round-trips through make_space ("t2", "circle").
  virtual std::string name() const = 0;
};

/// Unit flat torus R^d / Z^d with Lebesgue measure; d = 1 is the circle of
/// circumference 1.
class FlatTorus final : public Space {
 public:
  explicit FlatTorus(int dim);

  int dim() const override { return dim_; }
  double diameter() const override;
  double distance(const Point& x, const Point& y) const override;
  Point wrap(Point x) const override;
  Point sample(Rng& rng) const override;
  std::string name() const override;

 private:
  int dim_;
};

/// Reduce into [0,1).
inline double wrap_unit(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

/// Shortest signed representative of a coordinate difference, in [-1/2, 1/2].
inline double wrapped_delta(double d) {
  d -= std::floor(d + 0.5);
  return d;
}

/// "t<d>" for the flat d-torus, "circle" as an alias of "t1".
std::shared_ptr<const Space> make_space(std::string_view spec);

}  // namespace warpcone
