#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinchlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A point in chart coordinates of some MetricModel.
struct Point {
  Vec coords;

  Point() = default;
  explicit Point(Vec c) : coords(std::move(c)) {}
  Point(std::initializer_list<double> c) : coords(static_cast<Eigen::Index>(c.size())) {
    Eigen::Index i = 0;
    for (double x : c) coords[i++] = x;
  }

  int dim() const { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[i]; }
};

// Tangent vector in the coordinate basis at `base`.
struct TangentVector {
  Point base;
  Vec components;
};

// Two tangent vectors spanning a 2-plane at `base`.
struct TangentPlane {
  Point base;
  Vec u;
  Vec v;
};

// Point outside the valid chart domain of a model.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ODE integration could not proceed (step underflow, step budget).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine produced an invalid value or failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense rank-3 array, index (a, b, c) with row-major layout. Christoffel
// symbols use (upper, lower, lower).
class Array3 {
 public:
  Array3() = default;
  explicit Array3(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n, 0.0) {}

  int size() const { return n_; }
  double& operator()(int a, int b, int c) { return data_[(static_cast<std::size_t>(a) * n_ + b) * n_ + c]; }
  double operator()(int a, int b, int c) const { return data_[(static_cast<std::size_t>(a) * n_ + b) * n_ + c]; }

 private:
  int n_ = 0;
  std::vector<double> data_;
};

// Dense rank-4 array, index (a, b, c, d).
class Array4 {
 public:
  Array4() = default;
  explicit Array4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int size() const { return n_; }
  double& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }

 private:
  std::size_t index(int a, int b, int c, int d) const {
    return ((static_cast<std::size_t>(a) * n_ + b) * n_ + c) * n_ + d;
  }
  int n_ = 0;
  std::vector<double> data_;
};

}  // namespace pinchlab
