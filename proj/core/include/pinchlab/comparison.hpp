#pragma once

#include "pinchlab/flow.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pinchlab {

// Distance in the upper half-space model of curvature -b^2; the last
// coordinate is the height.
double hyperbolic_distance(const Vec& p, const Vec& pp, double b = 1.0);

// Distance in H^{n+1} of curvature -b^2 between Fermi points (q, t), (q', t')
// over a totally geodesic H^n, where d0 is the base distance of q and q'.
double warped_distance(double t, double tp, double d0, double b = 1.0);

// Closed-form distance when the model has one: UpperHalfSpace, and the
// WarpedSlice with warp cosh(b t) over a base of curvature -b^2.
std::optional<double> closed_form_distance(const MetricModel& model, const Point& p, const Point& pp);

struct BvpOptions {
  double tol = 1e-10;              // endpoint error, scaled by max(1, |p'|_inf)
  double integration_tol = 1e-12;  // geodesic integration tolerance
  int max_iterations = 200;
};

struct BvpResult {
  double distance = 0.0;
  TangentVector initial_direction;  // unit vector at p, zero when p = p'
  bool converged = false;
  int iterations = 0;
  double endpoint_error = 0.0;
};

// Geodesic shooting: solves exp_p(w) = p' for w by damped Newton iterations
// with a finite-difference Jacobian, seeded by the chart straight line, with
// a continuation fallback.
BvpResult geodesic_distance_bvp(const MetricModel& model, const Point& p, const Point& pp, const BvpOptions& options = {});

// Distance via the closed form when available, otherwise the BVP. Throws
// NumericalError when the BVP does not converge.
double model_distance(const MetricModel& model, const Point& p, const Point& pp, const BvpOptions& options = {});

// Bi-Lipschitz test maps on upper half-space coordinates of H^n.
class BaseMap {
 public:
  enum class Kind { Identity, Scaling, Radial };

  static BaseMap identity() { return BaseMap(Kind::Identity, 1.0); }
  // q -> lambda q; an isometry of the half-space metric.
  static BaseMap scaling(double lambda);
  // Radial stretch about (0, ..., 0, 1) in curvature -1 units:
  // rho -> rho + a tanh(rho), a >= 0, which is e^a bi-Lipschitz.
  static BaseMap radial(double a);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  std::string name() const;

  Vec operator()(const Vec& q) const;
  // Bi-Lipschitz constant as a map from the curvature -1 half-space to itself.
  double lipschitz() const;

 private:
  BaseMap(Kind kind, double param) : kind_(kind), param_(param) {}
  Kind kind_;
  double param_;
};

// Upper half-space point <-> Poincare ball point, with (0, ..., 0, 1) at the origin.
Vec half_space_to_ball(const Vec& q);
Vec ball_to_half_space(const Vec& z);

// F(q, t) = (f(q), beta t).
Point flow_map_F(const Vec& q, double t, const BaseMap& f, double beta);

struct PairSampler {
  std::size_t n_pairs = 1000;
  double t_max = 3.0;        // |t| bound in chart units
  double base_radius = 3.0;  // hyperbolic radius about (0, ..., 0, 1), curvature -1 units
  std::uint64_t seed = 0;
};

// Fermi-coordinate points sampled uniformly in (direction, radius, t).
std::vector<std::pair<Point, Point>> sample_pairs(int base_dim, const PairSampler& sampler);
Vec sample_base_point(int base_dim, double radius, std::uint64_t seed);

struct DistortionPair {
  Point p, pp;
  double d_X = 0.0;
  double d_H_beta = 0.0;
  double d_H_1 = 0.0;
  double ratio41 = 0.0;  // d_X / d_H_beta
  double ratio42 = 0.0;  // d_X / d_H_1
  bool ok = false;
  std::string error;
};

struct DistortionReport {
  double C_emp = 0.0;  // max ratio41
  double c_emp = 0.0;  // min ratio42
  double beta = 1.0;
  double L = 1.0;
  std::size_t n_pairs = 0;
  std::size_t n_skipped = 0;
  std::uint64_t seed = 0;
  bool ok = false;  // at most 10% skipped and 0 < c_emp, C_emp < inf
  std::vector<DistortionPair> pairs;
};

struct LemmaCheckOptions {
  BvpOptions bvp;
  unsigned workers = 0;
};

// Compares d_X(p, p') with the H^{n+1} distances of F_beta(p), F_beta(p') and
// F_1(p), F_1(p'). X must be a WarpedSlice and Sigma its zero slice; Fermi
// times are measured intrinsically (chart t times the model scale).
DistortionReport lemma_checks(const MetricModel& X, const Hypersurface& sigma, const BaseMap& f, double beta,
                              const PairSampler& sampler, const LemmaCheckOptions& options = {});

}  // namespace pinchlab
