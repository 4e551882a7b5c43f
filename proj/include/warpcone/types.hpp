#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace warpcone {

/// Raised for malformed arguments (wrong dimension, out-of-range level, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised while building an action or experiment from a configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative solver exhausts its budget.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline constexpr int kMaxDim = 4;

/// Point of a d-dimensional chart [0,1)^d. Storage is inline so that points
/// can be copied freely in the sampling loops.
class Point {
 public:
  Point() = default;
  explicit Point(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw InputError("point dimension out of range");
  }
  Point(std::initializer_list<double> coords) : dim_(static_cast<int>(coords.size())) {
    if (dim_ < 1 || dim_ > kMaxDim) throw InputError("point dimension out of range");
    std::size_t i = 0;
    for (double c : coords) c_[i++] = c;
  }

  int dim() const { return dim_; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

using VertexId = int;

}  // namespace warpcone
