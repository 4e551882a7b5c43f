#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "warpcone/space.hpp"

namespace warpcone {

/// One invertible, measure-preserving self-map of a torus.
struct Generator {
  enum class Kind { kMatrix, kRotation, kIdentity };

  Kind kind = Kind::kIdentity;
  int dim = 0;
  std::array<long long, kMaxDim * kMaxDim> matrix{};  // row-major, kMatrix only
  Point shift;                                        // kRotation only

  static Generator identity(int dim);
  static Generator rotation(const Point& v);
  /// Integer matrix, row-major, with determinant +-1.
  static Generator toral(int dim, const std::vector<long long>& entries);

  long long entry(int r, int c) const { return matrix[static_cast<std::size_t>(r * kMaxDim + c)]; }
  Generator inverse() const;
  /// Analytic Lipschitz constant for the flat metric (largest singular value).
  double lipschitz() const;
  Point apply(const Point& x) const;
  bool same_map(const Generator& other) const;
  std::string describe() const;
};

/// Symmetric finite generating set S of a group acting on a Space.
class Action {
 public:
  /// When `symmetrize` is set, missing inverses are appended; otherwise a
  /// missing inverse is a configuration error.
  Action(std::shared_ptr<const Space> space, std::vector<Generator> generators, bool symmetrize = true);

  const Space& space() const { return *space_; }
  const std::shared_ptr<const Space>& space_ptr() const { return space_; }
  int size() const { return static_cast<int>(generators_.size()); }
  const Generator& generator(int s) const { return generators_.at(static_cast<std::size_t>(s)); }
  const std::vector<Generator>& generators() const { return generators_; }
  int inverse_of(int s) const { return inverse_.at(static_cast<std::size_t>(s)); }
  const std::vector<double>& lipschitz_constants() const { return lipschitz_; }
  double max_lipschitz() const;

  Point apply(int s, const Point& x) const;

  /// Finite-index subgroup of SL2(Z) generated by [[1,2],[0,1]] and [[1,0],[2,1]].
  static Action sl2z(std::shared_ptr<const Space> space);
  static Action rotation(std::shared_ptr<const Space> space, const Point& shift);
  static Action identity(std::shared_ptr<const Space> space);

 private:
  std::shared_ptr<const Space> space_;
  std::vector<Generator> generators_;
  std::vector<int> inverse_;
  std::vector<double> lipschitz_;
};

/// Sampled distortion max d(s x, s y) / d(x, y) per generator. Pairs mix
/// uniform pairs with short displacements along random directions, so that
/// the estimate approaches the analytic constant from below.
std::vector<double> lipschitz_estimate(const Action& action, int n_pairs, std::uint64_t seed);

}  // namespace warpcone
