#include "warpcone/space.hpp"

#include <charconv>
#include <cmath>

namespace warpcone {

FlatTorus::FlatTorus(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw InputError("torus dimension must be in [1, " + std::to_string(kMaxDim) + "]");
}

double FlatTorus::diameter() const { return std::sqrt(static_cast<double>(dim_)) / 2.0; }

double FlatTorus::distance(const Point& x, const Point& y) const {
  if (x.dim() != dim_ || y.dim() != dim_) throw InputError("point dimension does not match space");
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double d = std::fabs(x[i] - y[i]);
    d -= std::floor(d);
    d = std::min(d, 1.0 - d);
    s += d * d;
  }
  return std::sqrt(s);
}

Point FlatTorus::wrap(Point x) const {
  if (x.dim() != dim_) throw InputError("point dimension does not match space");
  for (int i = 0; i < dim_; ++i) x[i] = wrap_unit(x[i]);
  return x;
}

Point FlatTorus::sample(Rng& rng) const {
  Point p(dim_);
  for (int i = 0; i < dim_; ++i) p[i] = rng.uniform();
  return p;
}

std::string FlatTorus::name() const { return dim_ == 1 ? "circle" : "t" + std::to_string(dim_); }

std::shared_ptr<const Space> make_space(std::string_view spec) {
  if (spec == "circle") return std::make_shared<FlatTorus>(1);
  if (spec.size() >= 2 && (spec[0] == 't' || spec[0] == 'T')) {
    int d = 0;
    auto [ptr, ec] = std::from_chars(spec.data() + 1, spec.data() + spec.size(), d);
    if (ec == std::errc() && ptr == spec.data() + spec.size()) return std::make_shared<FlatTorus>(d);
  }
  throw InputError("unknown space '" + std::string(spec) + "' (expected circle or t<d>)");
}

}  // namespace warpcone
