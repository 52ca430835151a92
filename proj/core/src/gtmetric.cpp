#include "pinchlab/gtmetric.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pinchlab {

SmoothingSpec SmoothingSpec::with_quarter_r0(int k, double rho) {
  SmoothingSpec s;
  s.k = k;
  s.rho = rho;
  s.r0 = rho / 4.0;
  return s;
}

void SmoothingSpec::validate() const {
  if (k < 1) throw std::invalid_argument("SmoothingSpec: k must be >= 1");
  if (!(r0 > 0.0) || !(rho > r0) || !std::isfinite(rho)) throw std::invalid_argument("SmoothingSpec: need 0 < r0 < rho");
  if (profile != "quintic") throw std::invalid_argument("SmoothingSpec: unknown profile '" + profile + "'");
}

Jet1D quintic_step(double u) {
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  if (u >= 1.0) return {1.0, 0.0, 0.0};
  const double u2 = u * u;
  const double w = 1.0 - u;
  return {u2 * u * (10.0 - 15.0 * u + 6.0 * u2), 30.0 * u2 * w * w, 60.0 * u * (2.0 * u - 1.0) * (u - 1.0)};
}

SmoothFunction1D build_sigma(const SmoothingSpec& spec) {
  spec.validate();
  if (spec.k == 1) {
    // k^s = 1 for every s
    return SmoothFunction1D(
        "gt(k=1)", [](double r) { return Jet1D{std::sinh(r), std::cosh(r), std::sinh(r)}; }, 0.0,
        std::numeric_limits<double>::infinity(), SmoothFunction1D::Family::Sinh, 1.0);
  }
  const double r0 = spec.r0, rho = spec.rho;
  const double logk = std::log(static_cast<double>(spec.k));
  const double kk = static_cast<double>(spec.k);
  const double inv_w = 1.0 / (rho - r0);
  std::ostringstream name;
  name << "gt(k=" << spec.k << ", r0=" << r0 << ", rho=" << rho << ")";
  return SmoothFunction1D(
      name.str(),
      [=](double r) -> Jet1D {
        const double sh = std::sinh(r), ch = std::cosh(r);
        if (r <= r0) return {sh, ch, sh};
        if (r >= rho) return {kk * sh, kk * ch, kk * sh};
        // sigma = e^{logk s(u)} sinh r
        const Jet1D s = quintic_step((r - r0) * inv_w);
        const double m = std::exp(logk * s.value);
        const double m1 = m * logk * s.d1 * inv_w;
        const double m2 = m * (logk * s.d2 * inv_w * inv_w + std::pow(logk * s.d1 * inv_w, 2));
        return {m * sh, m1 * sh + m * ch, m2 * sh + 2.0 * m1 * ch + m * sh};
      },
      0.0, std::numeric_limits<double>::infinity(), SmoothFunction1D::Family::Custom, 1.0);
}

PlaneCurvatures gt_plane_curvatures(const SmoothFunction1D& sigma, double r) {
  if (!(r > 0.0)) throw DomainError("gt_plane_curvatures: r must be positive");
  const Jet1D s = sigma(r);
  PlaneCurvatures K;
  K.K_rtheta = -s.d2 / s.value;
  K.K_rx = -1.0;
  K.K_thetax = -(s.d1 * std::sinh(r)) / (s.value * std::cosh(r));
  return K;
}

MetricModel gt_cone_model(const SmoothingSpec& spec, int fiber_dim, double r_max, double r_eps) {
  return MetricModel::cone_chart(fiber_dim, build_sigma(spec), r_max > 0.0 ? r_max : spec.rho + 1.0, r_eps);
}

GTReport pinching_report(const SmoothingSpec& spec, const GTGrid& grid) {
  spec.validate();
  if (grid.r_count < 2) throw std::invalid_argument("pinching_report: need at least two r values");
  GTReport rep;
  rep.spec = spec;
  rep.grid = grid;
  if (rep.grid.r_max <= 0.0) rep.grid.r_max = spec.rho + 1.0;
  const MetricModel model = gt_cone_model(spec, grid.fiber_dim, rep.grid.r_max, grid.r_eps);

  std::vector<AxisRange> axes(model.dim(), AxisRange{0.0, 0.0, 1});
  axes[0] = AxisRange{grid.r_eps, rep.grid.r_max, grid.r_count};
  ScanOptions opt;
  opt.random_planes = grid.random_planes;
  opt.seed = grid.seed;
  opt.workers = grid.workers;
  rep.scan = curvature_range_scan(model, axes, opt);
  rep.kappa_min = rep.scan.min.kappa;
  rep.kappa_max = rep.scan.max.kappa;
  rep.pinched = rep.kappa_max < 0.0;
  rep.status = rep.pinched ? "pinched" : "not pinched";
  rep.pinch_C = rep.pinched ? std::max(-rep.kappa_min, -1.0 / rep.kappa_max)
                            : std::numeric_limits<double>::infinity();
  return rep;
}

Rescaling rescale_to_pinched(double kappa_min, double kappa_max) {
  if (!(kappa_max < 0.0) || !(kappa_min <= kappa_max)) {
    throw std::invalid_argument("rescale_to_pinched: need kappa_min <= kappa_max < 0");
  }
  Rescaling r;
  r.lambda = std::sqrt(-kappa_max);
  r.kappa_max = -1.0;
  r.kappa_min = kappa_min / -kappa_max;
  r.epsilon = kappa_min / kappa_max - 1.0;
  return r;
}

Rescaling rescale_to_pinched(const GTReport& report) {
  if (!report.pinched) throw std::invalid_argument("rescale_to_pinched: report is not pinched");
  return rescale_to_pinched(report.kappa_min, report.kappa_max);
}

std::vector<ProfileRow> curvature_profile(const SmoothFunction1D& sigma, double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo) || !(lo > 0.0)) throw std::invalid_argument("curvature_profile: invalid range");
  std::vector<ProfileRow> rows(count);
  for (std::size_t i = 0; i < count; ++i) {
    rows[i].r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    rows[i].K = gt_plane_curvatures(sigma, rows[i].r);
  }
  return rows;
}

}  // namespace pinchlab
