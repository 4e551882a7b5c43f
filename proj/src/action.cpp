#include "warpcone/action.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace warpcone {
namespace {

using IntMatrix = std::array<long long, kMaxDim * kMaxDim>;

long long at(const IntMatrix& m, int r, int c) { return m[static_cast<std::size_t>(r * kMaxDim + c)]; }

IntMatrix minor_of(const IntMatrix& m, int n, int row, int col) {
  IntMatrix out{};
  int rr = 0;
  for (int r = 0; r < n; ++r) {
    if (r == row) continue;
    int cc = 0;
    for (int c = 0; c < n; ++c) {
      if (c == col) continue;
      out[static_cast<std::size_t>(rr * kMaxDim + cc)] = at(m, r, c);
      ++cc;
    }
    ++rr;
  }
  return out;
}

// Laplace expansion; n <= kMaxDim so the cost is irrelevant.
long long determinant(const IntMatrix& m, int n) {
  if (n == 1) return at(m, 0, 0);
  long long det = 0;
  for (int c = 0; c < n; ++c) {
    const long long sign = (c % 2 == 0) ? 1 : -1;
    det += sign * at(m, 0, c) * determinant(minor_of(m, n, 0, c), n - 1);
  }
  return det;
}

}  // namespace

Generator Generator::identity(int dim) {
  Generator g;
  g.kind = Kind::kIdentity;
  g.dim = dim;
  return g;
}

Generator Generator::rotation(const Point& v) {
  Generator g;
  g.kind = Kind::kRotation;
  g.dim = v.dim();
  g.shift = Point(v.dim());
  for (int i = 0; i < v.dim(); ++i) g.shift[i] = wrap_unit(v[i]);
  return g;
}

Generator Generator::toral(int dim, const std::vector<long long>& entries) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("matrix dimension out of range");
  if (entries.size() != static_cast<std::size_t>(dim * dim))
    throw ConfigError("matrix generator needs " + std::to_string(dim * dim) + " entries");
  Generator g;
  g.kind = Kind::kMatrix;
  g.dim = dim;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g.matrix[static_cast<std::size_t>(r * kMaxDim + c)] = entries[static_cast<std::size_t>(r * dim + c)];
  const long long det = determinant(g.matrix, dim);
  if (det != 1 && det != -1)
    throw ConfigError("matrix generator has determinant " + std::to_string(det) + ", expected +-1");
  return g;
}

Generator Generator::inverse() const {
  switch (kind) {
    case Kind::kIdentity:
      return *this;
    case Kind::kRotation: {
      Point v(dim);
      for (int i = 0; i < dim; ++i) v[i] = -shift[i];
      return rotation(v);
    }
    case Kind::kMatrix: {
      const long long det = determinant(matrix, dim);
      std::vector<long long> inv(static_cast<std::size_t>(dim * dim));
      if (dim == 1) {
        inv[0] = det;
      } else {
        // inverse = adj / det, and det = +-1
        for (int r = 0; r < dim; ++r)
          for (int c = 0; c < dim; ++c) {
            const long long sign = ((r + c) % 2 == 0) ? 1 : -1;
            inv[static_cast<std::size_t>(c * dim + r)] = sign * determinant(minor_of(matrix, dim, r, c), dim - 1) * det;
          }
      }
      return toral(dim, inv);
    }
  }
  return *this;
}

double Generator::lipschitz() const {
  if (kind != Kind::kMatrix) return 1.0;
  Eigen::MatrixXd a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = static_cast<double>(entry(r, c));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

Point Generator::apply(const Point& x) const {
  switch (kind) {
    case Kind::kIdentity:
      return x;
    case Kind::kRotation: {
      Point y(dim);
      for (int i = 0; i < dim; ++i) y[i] = wrap_unit(x[i] + shift[i]);
      return y;
    }
    case Kind::kMatrix: {
      Point y(dim);
      for (int r = 0; r < dim; ++r) {
        double acc = 0.0;
        for (int c = 0; c < dim; ++c) acc += static_cast<double>(entry(r, c)) * x[c];
        y[r] = wrap_unit(acc);
      }
      return y;
    }
  }
  return x;
}

bool Generator::same_map(const Generator& other) const {
  if (dim != other.dim || kind != other.kind) return false;
  switch (kind) {
    case Kind::kIdentity:
      return true;
    case Kind::kRotation:
      for (int i = 0; i < dim; ++i)
        if (std::fabs(wrapped_delta(shift[i] - other.shift[i])) > 1e-15) return false;
      return true;
    case Kind::kMatrix:
      return matrix == other.matrix;
  }
  return false;
}

std::string Generator::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kIdentity:
      os << "identity " << dim;
      break;
    case Kind::kRotation:
      os << "rotation";
      for (int i = 0; i < dim; ++i) os << ' ' << shift[i];
      break;
    case Kind::kMatrix:
      os << "matrix";
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) os << ' ' << entry(r, c);
      break;
  }
  return os.str();
}

Action::Action(std::shared_ptr<const Space> space, std::vector<Generator> generators, bool symmetrize)
    : space_(std::move(space)), generators_(std::move(generators)) {
  if (!space_) throw ConfigError("action needs a space");
  if (generators_.empty()) throw ConfigError("action needs at least one generator");
  for (const auto& g : generators_)
    if (g.dim != space_->dim()) throw ConfigError("generator dimension does not match space");

  auto find = [this](const Generator& g) -> int {
    for (std::size_t i = 0; i < generators_.size(); ++i)
      if (generators_[i].same_map(g)) return static_cast<int>(i);
    return -1;
  };
  const std::size_t declared = generators_.size();
  for (std::size_t i = 0; i < declared; ++i) {
    const Generator inv = generators_[i].inverse();
    if (find(inv) < 0) {
      if (!symmetrize) throw ConfigError("generating set is not symmetric: missing inverse of " + generators_[i].describe());
      generators_.push_back(inv);
    }
  }
  inverse_.resize(generators_.size());
  lipschitz_.resize(generators_.size());
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    inverse_[i] = find(generators_[i].inverse());
    lipschitz_[i] = generators_[i].lipschitz();
  }
}

double Action::max_lipschitz() const { return *std::max_element(lipschitz_.begin(), lipschitz_.end()); }

Point Action::apply(int s, const Point& x) const {
  if (s < 0 || s >= size()) throw InputError("generator index out of range");
  if (x.dim() != space_->dim()) throw InputError("point dimension does not match space");
  return generators_[static_cast<std::size_t>(s)].apply(x);
}

Action Action::sl2z(std::shared_ptr<const Space> space) {
  if (!space || space->dim() != 2) throw ConfigError("sl2z action needs the 2-torus");
  return Action(std::move(space), {Generator::toral(2, {1, 2, 0, 1}), Generator::toral(2, {1, 0, 2, 1})});
}

Action Action::rotation(std::shared_ptr<const Space> space, const Point& shift) {
  return Action(std::move(space), {Generator::rotation(shift)});
}

Action Action::identity(std::shared_ptr<const Space> space) {
  const int d = space ? space->dim() : 1;
  return Action(std::move(space), {Generator::identity(d)});
}

std::vector<double> lipschitz_estimate(const Action& action, int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1) throw InputError("n_pairs must be >= 1");
  const Space& space = action.space();
  const int d = space.dim();
  std::vector<double> best(static_cast<std::size_t>(action.size()), 0.0);
  for (int s = 0; s < action.size(); ++s) {
    Rng rng(substream(seed, "lipschitz", static_cast<std::uint64_t>(s)));
    double& out = best[static_cast<std::size_t>(s)];
    for (int i = 0; i < n_pairs; ++i) {
      const Point x = space.sample(rng);
      Point y;
      double dxy = 0.0;
      do {
        if (i % 2 == 0) {
          y = space.sample(rng);
        } else {
          Point v(d);
          double norm = 0.0;
          do {
            norm = 0.0;
            for (int k = 0; k < d; ++k) {
              v[k] = rng.normal();
              norm += v[k] * v[k];
            }
          } while (norm == 0.0);
          norm = std::sqrt(norm);
          const double r = std::pow(10.0, rng.uniform(-4.0, -1.0));
          y = Point(d);
          for (int k = 0; k < d; ++k) y[k] = x[k] + r * v[k] / norm;
          y = space.wrap(y);
        }
        dxy = space.distance(x, y);
      } while (dxy == 0.0);  // resample, never divide by zero
      out = std::max(out, space.distance(action.apply(s, x), action.apply(s, y)) / dxy);
    }
  }
  return best;
}

}  // namespace warpcone
