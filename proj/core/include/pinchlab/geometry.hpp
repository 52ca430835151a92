#pragma once

#include "pinchlab/smooth_function.hpp"
#include "pinchlab/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace pinchlab {

// Upper half-space chart of constant curvature -b^2:
//   g = (dx_1^2 + ... + dx_{dim-1}^2 + dy^2) / (b^2 y^2),  y > 0.
// Coordinates are (x_1, ..., x_{dim-1}, y).
struct UpperHalfSpace {
  int dim = 2;
  double b = 1.0;
};

// Warped product warp(t)^2 g_base + dt^2 over a constant-curvature base.
// Coordinates are (q_1, ..., q_n, t) with q in the base chart. The slice
// t = 0 carries Fermi coordinates (q, t) when warp'(0) = 0.
struct WarpedSlice {
  UpperHalfSpace base;
  SmoothFunction1D warp;
};

// Doubly warped cone chart around a codimension-2 axis:
//   g = dr^2 + sigma(r)^2 dtheta^2 + cosh(r)^2 g_fiber(x),
// on (r, theta, x) in [r_eps, r_max] x R x R^fiber_dim. The fiber is
// hyperbolic (fiber_dim)-space in iterated Fermi coordinates,
//   g_fiber = dx_m^2 + cosh(x_m)^2 (dx_{m-1}^2 + cosh(x_{m-1})^2 (... dx_1^2)),
// which is the flat line when fiber_dim = 1. theta is left unwrapped.
struct ConeChart {
  int fiber_dim = 1;
  SmoothFunction1D sigma;
  double r_max = 20.0;
  double r_eps = 1e-3;
};

// A chart plus metric rule. The metric is lambda^2 times the variant's metric,
// so sectional curvatures scale by 1/lambda^2.
class MetricModel {
 public:
  using Chart = std::variant<UpperHalfSpace, WarpedSlice, ConeChart>;

  static MetricModel upper_half_space(int dim, double b = 1.0);
  static MetricModel warped_slice(UpperHalfSpace base, SmoothFunction1D warp);
  // H^{base_dim+1} of curvature -b^2 in Fermi coordinates over a totally
  // geodesic H^{base_dim}: warp cosh(b t) over UpperHalfSpace(base_dim, b).
  static MetricModel hyperbolic_fermi(int base_dim, double b = 1.0);
  static MetricModel cone_chart(int fiber_dim, SmoothFunction1D sigma, double r_max, double r_eps = 1e-3);

  // Same chart with metric lambda^2 g.
  MetricModel rescaled(double lambda) const;

  int dim() const { return dim_; }
  double scale() const { return lambda_; }
  const Chart& chart() const { return chart_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&chart_);
  }

  bool contains(const Point& p) const;
  // Throws DomainError when p is not a valid chart point.
  void check_domain(const Point& p) const;
  std::string describe() const;

 private:
  MetricModel(Chart chart, double lambda);

  Chart chart_;
  double lambda_ = 1.0;
  int dim_ = 0;
};

// Value, first and second derivatives of a diagonal metric:
//   g(i) = g_ii, dg(i, k) = d_k g_ii, d2g[i](k, l) = d_k d_l g_ii.
// Every model variant is diagonal in its chart.
struct DiagonalJet {
  Vec g;
  Mat dg;
  std::vector<Mat> d2g;
};

// General metric 2-jet: dg[k] = d_k g, d2g[k][l] = d_k d_l g.
struct MetricJet {
  Mat g;
  std::vector<Mat> dg;
  std::vector<std::vector<Mat>> d2g;
};

using MetricField = std::function<Mat(const Vec&)>;

Mat metric_at(const MetricModel& model, const Point& p);
DiagonalJet diagonal_jet(const MetricModel& model, const Point& p, bool with_second = true);
MetricJet metric_jet(const MetricModel& model, const Point& p);

double inner(const MetricModel& model, const Point& p, const Vec& u, const Vec& v);
double norm(const MetricModel& model, const Point& p, const Vec& u);

// Closed-form Christoffel symbols Gamma(k, i, j) = Gamma^k_{ij}.
Array3 christoffel_at(const MetricModel& model, const Point& p);
Array3 christoffel_from_jet(const MetricJet& jet);
// Centered finite differences of the metric field with step h.
Array3 christoffel_fd(const MetricField& metric, const Vec& p, double h = 1e-5);

// Lowered Riemann tensor R(a, b, c, d) = <R(d_c, d_d) d_b, d_a> built from
// the metric 2-jet (the generic tensor route).
Array4 riemann_from_jet(const MetricJet& jet);
Array4 riemann_tensor(const MetricModel& model, const Point& p);

enum class CurvatureRoute {
  ClosedForm,  // diagonal curvature operator in the orthonormal coordinate frame
  Tensor,      // full Riemann tensor from the analytic metric jet
};

// s_i = |d_i|, so that d_i / s_i is an orthonormal frame.
Vec orthonormal_scales(const MetricModel& model, const Point& p);

// K(i, j) = sectional curvature of the coordinate plane (d_i, d_j); diagonal
// entries are zero. Every variant has a curvature operator that is diagonal
// on the bivectors of the orthonormal coordinate frame, so these values
// determine all sectional curvatures.
Mat coordinate_plane_curvatures(const MetricModel& model, const Point& p);

// <R(x, v) v, y> from the closed-form plane curvatures.
double curvature_form(const MetricModel& model, const Point& p, const Vec& x, const Vec& v, const Vec& y);

// A(a, b) = <R(F_b, v) v, F_a> for the columns F_a of `frame`.
Mat jacobi_operator(const MetricModel& model, const Point& p, const Vec& v, const Mat& frame);

// K(u, v) = <R(u,v)v,u> / (|u|^2 |v|^2 - <u,v>^2). Throws
// std::invalid_argument for a degenerate plane.
double sectional_curvature(const MetricModel& model, const TangentPlane& plane,
                           CurvatureRoute route = CurvatureRoute::ClosedForm);

struct AxisRange {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;  // count == 1 samples lo only
};

struct ScanOptions {
  std::size_t random_planes = 8;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  CurvatureRoute route = CurvatureRoute::ClosedForm;
};

struct CurvatureExtremum {
  double kappa = 0.0;
  TangentPlane plane;
};

struct CurvatureScan {
  CurvatureExtremum min;
  CurvatureExtremum max;
  // Per coordinate plane (i < j) extrema over the grid; NaN elsewhere.
  Mat plane_min;
  Mat plane_max;
  std::size_t n_points = 0;
  std::size_t n_planes = 0;
};

// Scans all coordinate planes plus `random_planes` seeded random planes at
// every point of the Cartesian grid. Deterministic for a given seed and
// independent of the worker count.
CurvatureScan curvature_range_scan(const MetricModel& model, const std::vector<AxisRange>& grid,
                                   const ScanOptions& options = {});

// Cartesian grid points in lexicographic order (last axis fastest).
std::vector<Point> grid_points(const std::vector<AxisRange>& grid);

}  // namespace pinchlab
