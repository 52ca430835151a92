#pragma once

// Reference computations used by the tests. Nothing here calls into the
// library except for the plain Vec/Mat types.

#include "pinchlab/types.hpp"

#include <functional>

namespace pinchlab::oracle {

using MetricFn = std::function<Mat(const Vec&)>;

// Metrics written out directly from their defining formulas.
MetricFn uhs_metric(double b, double lambda = 1.0);
// cosh(b t)^2 g_uhs(b) + dt^2, coordinates (q, t)
MetricFn fermi_metric(double b, double lambda = 1.0);
// dr^2 + sigma(r)^2 dtheta^2 + cosh(r)^2 g_fiber, fiber in iterated Fermi coordinates
MetricFn cone_metric(int fiber_dim, std::function<double(double)> sigma, double lambda = 1.0);

// Sectional curvature from nested central differences of the metric.
double fd_sectional(const MetricFn& g, const Vec& x, const Vec& u, const Vec& v, double h_outer = 1e-3,
                    double h_inner = 1e-4);

// Hyperboloid model (X_0 first, signature -+...+), curvature -1.
Vec uhs_to_hyperboloid(const Vec& p);
double hyperboloid_distance(const Vec& X, const Vec& Y);
double uhs_distance(const Vec& p, const Vec& pp, double b = 1.0);
// Fermi point (q, t) over the totally geodesic {X_last = 0}: (cosh t Q(q), sinh t).
Vec fermi_to_hyperboloid(const Vec& q, double t);
double fermi_distance(const Vec& q, double t, const Vec& qp, double tp, double b = 1.0);

// Perpendicular Jacobi field in constant curvature -b^2 in a parallel frame.
Vec constant_curvature_jacobi(double b, const Vec& j0, const Vec& jp0, double t);

// Ordinary least squares y = a + s x in long double.
struct Line {
  double slope;
  double intercept;
};
Line least_squares(const std::vector<double>& x, const std::vector<double>& y);

// Second derivative by a five-point stencil.
double fd_second(const std::function<double(double)>& f, double x, double h = 1e-3);

}  // namespace pinchlab::oracle
