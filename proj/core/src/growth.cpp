#include "pinchlab/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace pinchlab {

NormField sample_norm_field(const MetricModel& model, const Hypersurface& sigma, const std::vector<Point>& q_grid,
                            const std::vector<double>& t_grid, const FlowOptions& options, unsigned workers) {
  if (q_grid.empty() || t_grid.empty()) throw std::invalid_argument("sample_norm_field: empty grid");
  const auto diffs = dphi_operator_norm_batch(model, sigma, q_grid, t_grid, options, workers);

  NormField field;
  field.ts = t_grid;
  field.samples.reserve(diffs.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  field.sup_norm.assign(t_grid.size(), nan);
  field.spread.assign(t_grid.size(), nan);
  std::vector<double> lo(t_grid.size(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(t_grid.size(), -std::numeric_limits<double>::infinity());

  for (std::size_t idx = 0; idx < diffs.size(); ++idx) {
    const auto& d = diffs[idx];
    GrowthSample s;
    s.q = q_grid[idx / t_grid.size()];
    s.q_index = idx / t_grid.size();
    s.t = d.t;
    s.norm = d.operator_norm;
    s.status = d.status;
    s.error = d.error;
    if (s.ok() && !(std::isfinite(s.norm) && s.norm > 0.0)) s.error = "non-finite norm";
    if (s.ok()) {
      const std::size_t j = idx % t_grid.size();
      lo[j] = std::min(lo[j], s.norm);
      hi[j] = std::max(hi[j], s.norm);
    } else {
      ++field.failures;
    }
    field.samples.push_back(std::move(s));
  }
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    if (hi[j] >= lo[j]) {
      field.sup_norm[j] = hi[j];
      field.spread[j] = hi[j] - lo[j];
    }
  }
  return field;
}

namespace {

SideFit fit_side(const std::vector<std::pair<double, double>>& pts, const std::string& side) {
  SideFit f;
  f.side = side;
  f.n = pts.size();
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(f.n);
  my /= static_cast<double>(f.n);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  f.beta = sxy / sxx;
  f.logC = my - f.beta * mx;
  double ssr = 0.0;
  f.t_min = std::numeric_limits<double>::infinity();
  f.t_max = -std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pts) {
    const double r = y - (f.logC + f.beta * x);
    ssr += r * r;
    f.t_min = std::min(f.t_min, x);
    f.t_max = std::max(f.t_max, x);
  }
  f.residual_rms = std::sqrt(ssr / static_cast<double>(f.n));
  f.beta_stderr = f.n > 2 ? std::sqrt(ssr / static_cast<double>(f.n - 2) / sxx) : 0.0;
  return f;
}

}  // namespace

GrowthFit fit_growth_exponent(const std::vector<double>& ts, const std::vector<double>& norms, double t_min) {
  if (ts.size() != norms.size()) throw std::invalid_argument("fit_growth_exponent: size mismatch");
  if (!(t_min >= 0.0)) throw std::invalid_argument("fit_growth_exponent: t_min must be nonnegative");
  // sup over q for each exact t value
  std::map<double, double> sup;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(norms[i] > 0.0) || !std::isfinite(norms[i])) {
      throw std::invalid_argument("fit_growth_exponent: norms must be positive and finite");
    }
    auto [it, inserted] = sup.emplace(ts[i], norms[i]);
    if (!inserted) it->second = std::max(it->second, norms[i]);
  }
  std::vector<std::pair<double, double>> pos, neg;
  for (const auto& [t, n] : sup) {
    if (std::abs(t) < t_min || t == 0.0) continue;
    (t > 0.0 ? pos : neg).emplace_back(std::abs(t), std::log(n));
  }

  GrowthFit fit;
  for (auto* side : {&pos, &neg}) {
    if (side->size() < 2) continue;
    fit.sides.push_back(fit_side(*side, side == &pos ? "positive" : "negative"));
  }
  if (fit.sides.empty()) {
    throw std::invalid_argument("fit_growth_exponent: need at least two distinct |t| >= t_min on some side");
  }
  const SideFit* best = &fit.sides.front();
  for (const auto& s : fit.sides) {
    if (s.beta > best->beta) best = &s;
  }
  fit.beta_hat = best->beta;
  fit.logC_hat = best->logC;
  fit.residual_rms = best->residual_rms;
  fit.t_min = best->t_min;
  fit.t_max = best->t_max;
  fit.side = best->side;
  fit.ci_low = best->beta - 1.96 * best->beta_stderr;
  fit.ci_high = best->beta + 1.96 * best->beta_stderr;
  return fit;
}

GrowthFit fit_growth_exponent(const std::vector<GrowthSample>& samples, double t_min) {
  std::vector<double> ts, norms;
  for (const auto& s : samples) {
    if (!s.ok()) continue;
    ts.push_back(s.t);
    norms.push_back(s.norm);
  }
  return fit_growth_exponent(ts, norms, t_min);
}

BoundReport bound_report(const std::vector<GrowthSample>& samples, const GrowthFit& fit, double b) {
  if (!(b >= 1.0) || !std::isfinite(b)) throw std::invalid_argument("bound_report: b must be >= 1");
  BoundReport r;
  r.b = b;
  r.C_emp = -std::numeric_limits<double>::infinity();
  r.c_emp = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (!s.ok()) continue;
    if (!(s.norm > 0.0) || !std::isfinite(s.norm)) throw std::invalid_argument("bound_report: invalid norm");
    const double at = std::abs(s.t);
    r.C_emp = std::max(r.C_emp, s.norm * std::exp(-b * at));
    r.c_emp = std::min(r.c_emp, s.norm * std::exp(-at));
    ++r.n;
  }
  if (r.n == 0) throw std::invalid_argument("bound_report: no successful samples");
  for (const auto& s : samples) {
    if (!s.ok()) continue;
    if (s.norm > r.C_emp * std::exp(b * std::abs(s.t)) * (1.0 + 1e-12)) ++r.violations;
  }
  r.lemma32_ok = std::isfinite(r.C_emp);
  r.lemma33_ok = r.c_emp > 0.0;
  r.exponent_within_b = fit.beta_hat <= b;
  return r;
}

}  // namespace pinchlab
