#pragma once

#include "pinchlab/geometry.hpp"

#include <string>
#include <vector>

namespace pinchlab {

// Interpolation data for sigma(r) between sinh(r) on [0, r0] and k sinh(r)
// on [rho, inf).
struct SmoothingSpec {
  int k = 2;
  double r0 = 1.5;
  double rho = 6.0;
  std::string profile = "quintic";

  // r0 = rho / 4
  static SmoothingSpec with_quarter_r0(int k, double rho);
  // Throws std::invalid_argument unless k >= 1, 0 < r0 < rho and the profile is known.
  void validate() const;
};

// Quintic smoothstep 6u^5 - 15u^4 + 10u^3 on [0, 1] (clamped outside).
Jet1D quintic_step(double u);

// sigma(r) = k^{s(u)} sinh(r), u = (r - r0) / (rho - r0), defined for r > 0.
SmoothFunction1D build_sigma(const SmoothingSpec& spec);

struct PlaneCurvatures {
  double K_rtheta = 0.0;
  double K_rx = 0.0;
  double K_thetax = 0.0;
};

// Closed-form coordinate-plane curvatures of dr^2 + sigma^2 dtheta^2 + cosh^2 r dx^2.
PlaneCurvatures gt_plane_curvatures(const SmoothFunction1D& sigma, double r);

// Cone chart carrying the smoothed metric.
MetricModel gt_cone_model(const SmoothingSpec& spec, int fiber_dim = 1, double r_max = 0.0, double r_eps = 1e-3);

struct GTGrid {
  double r_eps = 1e-3;
  double r_max = 0.0;  // 0 means rho + 1
  std::size_t r_count = 400;
  int fiber_dim = 1;
  std::size_t random_planes = 8;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

struct GTReport {
  SmoothingSpec spec;
  GTGrid grid;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double pinch_C = 0.0;  // max(-kappa_min, -1/kappa_max) when pinched
  bool pinched = false;
  std::string status;    // "pinched" or "not pinched"
  CurvatureScan scan;    // includes the per-plane extrema table
};

// Curvature scan of the smoothed cone metric over r in [r_eps, r_max]. The
// metric is invariant in theta and x, so those axes are sampled once.
GTReport pinching_report(const SmoothingSpec& spec, const GTGrid& grid = {});

struct Rescaling {
  double lambda = 1.0;
  double kappa_min = 0.0;  // rescaled range
  double kappa_max = 0.0;
  double epsilon = 0.0;    // kappa_min / kappa_max - 1
};

// lambda = sqrt(-kappa_max), so lambda^2 g has curvature in
// [kappa_min / |kappa_max|, -1]. Throws unless kappa_max < 0.
Rescaling rescale_to_pinched(double kappa_min, double kappa_max);
Rescaling rescale_to_pinched(const GTReport& report);

struct ProfileRow {
  double r = 0.0;
  PlaneCurvatures K;
};

// Curvature profile on `count` equally spaced r in [lo, hi].
std::vector<ProfileRow> curvature_profile(const SmoothFunction1D& sigma, double lo, double hi, std::size_t count);

}  // namespace pinchlab
