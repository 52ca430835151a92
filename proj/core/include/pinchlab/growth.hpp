#pragma once

#include "pinchlab/flow.hpp"

#include <string>
#include <vector>

namespace pinchlab {

struct GrowthSample {
  Point q;
  std::size_t q_index = 0;
  double t = 0.0;
  double norm = 0.0;
  OdeStatus status = OdeStatus::Ok;
  std::string error;

  bool ok() const { return error.empty() && status == OdeStatus::Ok; }
};

struct NormField {
  std::vector<GrowthSample> samples;  // q-major: index i * ts.size() + j
  std::vector<double> ts;
  std::vector<double> sup_norm;  // per t, over successful samples (NaN if none)
  std::vector<double> spread;    // per t, max - min over successful samples
  std::size_t failures = 0;
};

// ||dPhi_t(q)|| for every (q, t). Failed samples are recorded, not thrown.
NormField sample_norm_field(const MetricModel& model, const Hypersurface& sigma, const std::vector<Point>& q_grid,
                            const std::vector<double>& t_grid, const FlowOptions& options = {}, unsigned workers = 0);

// Least-squares line log(sup norm) = logC + beta |t| on one side of t = 0.
struct SideFit {
  std::string side;  // "positive" or "negative"
  double beta = 0.0;
  double logC = 0.0;
  double residual_rms = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t n = 0;
  double beta_stderr = 0.0;
};

struct GrowthFit {
  double beta_hat = 0.0;
  double logC_hat = 0.0;
  double residual_rms = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::string side;
  // 95% interval for beta_hat, normal approximation from the slope's standard
  // error; zero width for exact fits or two-point fits.
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<SideFit> sides;
};

// Fits each side with at least two distinct |t| >= t_min and returns the
// steeper one. Uses the per-t supremum over successful samples. Throws
// std::invalid_argument for too few points or a nonpositive norm.
GrowthFit fit_growth_exponent(const std::vector<GrowthSample>& samples, double t_min = 2.0);
GrowthFit fit_growth_exponent(const std::vector<double>& ts, const std::vector<double>& norms, double t_min = 2.0);

struct BoundReport {
  double b = 1.0;
  double C_emp = 0.0;  // max norm * e^{-b|t|}
  double c_emp = 0.0;  // min norm * e^{-|t|}
  bool lemma32_ok = false;
  bool lemma33_ok = false;
  // samples with norm > C_emp e^{b|t|} (1 + 1e-12)
  std::size_t violations = 0;
  std::size_t n = 0;
  // fitted exponent does not exceed b
  bool exponent_within_b = false;
};

// Empirical upper and lower constants for e^{b|t|} and e^{|t|} growth. b >= 1.
BoundReport bound_report(const std::vector<GrowthSample>& samples, const GrowthFit& fit, double b);

}  // namespace pinchlab
