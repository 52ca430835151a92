#include "experiment.hpp"

#include "pinchlab/comparison.hpp"
#include "pinchlab/growth.hpp"
#include "pinchlab/io.hpp"
#include "pinchlab/parallel.hpp"
#include "pinchlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace pinchlab::cli {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// Failed validation of a computed result (exit 4).
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T required(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("field '") + key + "' must be an object");
  return j.at(key);
}

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  try {
    if (v.is_number()) return {v.get<double>()};
    return v.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' must be a number or a list of numbers");
  }
}

void write_json(const std::filesystem::path& path, const ojson& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct Context {
  const json& cfg;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  double tol = 1e-10;
  RunResult& result;

  std::filesystem::path file(const std::string& name) {
    result.files.push_back(out / name);
    return out / name;
  }
};

std::string default_hypersurface(const MetricModel& model) {
  if (model.as<WarpedSlice>()) return "warped_zero_slice";
  if (model.as<ConeChart>()) return "cone_reflection_slice";
  return "half_space_vertical";
}

Hypersurface parse_hypersurface(const std::string& name) {
  if (name == "warped_zero_slice") return Hypersurface::warped_zero_slice();
  if (name == "cone_reflection_slice") return Hypersurface::cone_reflection_slice();
  if (name == "half_space_vertical") return Hypersurface::half_space_vertical();
  throw ConfigError("unknown hypersurface '" + name + "'");
}

std::vector<double> parse_t_grid(const json& cfg) {
  if (!cfg.contains("t_grid")) throw ConfigError("missing field 't_grid'");
  const json& g = cfg.at("t_grid");
  if (g.is_array()) {
    try {
      return g.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError("t_grid must be a list of numbers or {lo, hi, count}");
    }
  }
  const double lo = required<double>(g, "lo");
  const double hi = required<double>(g, "hi");
  const auto count = required<std::size_t>(g, "count");
  if (count == 0) throw ConfigError("t_grid.count must be positive");
  std::vector<double> ts(count);
  for (std::size_t i = 0; i < count; ++i) {
    ts[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return ts;
}

// Points on Sigma: explicit {"points": [...]} or seeded {"random": N, ...}.
std::vector<Point> parse_q_grid(const json& cfg, const MetricModel& model, const Hypersurface& sigma,
                                std::uint64_t seed) {
  const json& g = section(cfg, "q_grid");
  std::vector<Point> qs;
  if (g.contains("points")) {
    std::vector<std::vector<double>> raw;
    try {
      raw = g.at("points").get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
      throw ConfigError("q_grid.points must be a list of coordinate lists");
    }
    for (const auto& r : raw) qs.emplace_back(Vec(Eigen::Map<const Vec>(r.data(), static_cast<Eigen::Index>(r.size()))));
  } else {
    const auto n = value_or<std::size_t>(g, "random", 5);
    const int d = model.dim();
    const int c = sigma.normal_coordinate(model);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t s = derive_seed(seed, i);
      Vec x(d);
      if (sigma.kind() == Hypersurface::Kind::ConeReflectionSlice) {
        const auto r = value_or<std::vector<double>>(g, "r", {0.5, 4.0});
        const auto xr = value_or<std::vector<double>>(g, "x", {-1.0, 1.0});
        if (r.size() != 2 || xr.size() != 2) throw ConfigError("q_grid.r and q_grid.x must be [lo, hi]");
        SplitMix64 rng(s);
        x[0] = rng.uniform(r[0], r[1]);
        x[1] = 0.0;
        for (int i2 = 2; i2 < d; ++i2) x[i2] = rng.uniform(xr[0], xr[1]);
      } else {
        const double radius = value_or<double>(g, "radius", 2.0);
        const Vec b = sample_base_point(d - 1, radius, s);
        for (int k = 0, j = 0; k < d; ++k) x[k] = k == c ? 0.0 : b[j++];
      }
      qs.emplace_back(std::move(x));
    }
  }
  if (qs.empty()) throw ConfigError("q_grid is empty");
  for (const auto& q : qs) {
    if (!sigma.contains(model, q, 1e-9)) throw ConfigError("q_grid point is not on the hypersurface " + sigma.name());
  }
  return qs;
}

BvpOptions parse_bvp(const json& cfg, double tol) {
  const json& b = section(cfg, "bvp");
  BvpOptions o;
  o.tol = value_or<double>(b, "tol", o.tol);
  o.integration_tol = value_or<double>(b, "integration_tol", std::min(o.integration_tol, tol));
  o.max_iterations = value_or<int>(b, "max_iterations", o.max_iterations);
  if (!(o.tol > 0.0) || !(o.integration_tol > 0.0) || o.max_iterations < 1) throw ConfigError("invalid bvp options");
  return o;
}

ojson curvature_json(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

// Lower curvature bound over the region the normal flow samples.
double curvature_floor(const MetricModel& model, const std::vector<Point>& qs, std::uint64_t seed, unsigned workers) {
  ScanOptions opt;
  opt.seed = seed;
  opt.workers = workers;
  if (const auto* c = model.as<ConeChart>()) {
    std::vector<AxisRange> axes(model.dim(), AxisRange{0.0, 0.0, 1});
    axes[0] = AxisRange{c->r_eps, c->r_max, 400};
    return curvature_range_scan(model, axes, opt).min.kappa;
  }
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& q : qs) {
    std::vector<AxisRange> axes;
    for (int i = 0; i < q.dim(); ++i) axes.push_back(AxisRange{q[i], q[i], 1});
    lo = std::min(lo, curvature_range_scan(model, axes, opt).min.kappa);
  }
  return lo;
}

void cmd_curvature(Context& ctx) {
  const MetricModel model = parse_model(ctx.cfg.at("model"), ctx.workers);
  if (!ctx.cfg.contains("grid") || !ctx.cfg.at("grid").is_array()) throw ConfigError("curvature needs a 'grid' list");
  std::vector<AxisRange> grid;
  for (const auto& a : ctx.cfg.at("grid")) {
    grid.push_back(AxisRange{required<double>(a, "lo"), required<double>(a, "hi"), value_or<std::size_t>(a, "count", 1)});
  }
  if (static_cast<int>(grid.size()) != model.dim()) throw ConfigError("grid needs one axis per chart coordinate");
  ScanOptions opt;
  opt.random_planes = value_or<std::size_t>(ctx.cfg, "random_planes", 8);
  opt.seed = ctx.seed;
  opt.workers = ctx.workers;
  const CurvatureScan scan = curvature_range_scan(model, grid, opt);

  write_curvature_planes(ctx.file("curvature_planes.csv"), scan);
  ojson s;
  s["command"] = "curvature";
  s["model"] = model.describe();
  s["kappa_min"] = scan.min.kappa;
  s["kappa_max"] = scan.max.kappa;
  s["n_points"] = scan.n_points;
  s["n_planes"] = scan.n_planes;
  s["random_planes"] = opt.random_planes;
  s["seed"] = ctx.seed;
  write_json(ctx.file("curvature_summary.json"), s);

  ctx.result.summary = "curvature: range [" + fmt("%.3f", scan.min.kappa) + ", " + fmt("%.3f", scan.max.kappa) + "]";
  if (value_or<bool>(ctx.cfg, "require_negative", true) && !(scan.max.kappa < 0.0)) {
    throw ValidationFailure("nonnegative sectional curvature found");
  }
}

struct Sampled {
  MetricModel model;
  Hypersurface sigma;
  std::vector<Point> qs;
  NormField field;
};

Sampled sample_field(Context& ctx) {
  MetricModel model = parse_model(ctx.cfg.at("model"), ctx.workers);
  const Hypersurface sigma =
      parse_hypersurface(value_or<std::string>(ctx.cfg, "hypersurface", default_hypersurface(model)));
  try {
    sigma.check_model(model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::vector<Point> qs = parse_q_grid(ctx.cfg, model, sigma, ctx.seed);
  const std::vector<double> ts = parse_t_grid(ctx.cfg);
  FlowOptions fo;
  fo.tol = ctx.tol;
  NormField field = sample_norm_field(model, sigma, qs, ts, fo, ctx.workers);
  return Sampled{std::move(model), sigma, std::move(qs), std::move(field)};
}

void cmd_flow_norms(Context& ctx) {
  const Sampled s = sample_field(ctx);
  write_growth_samples(ctx.file("growth_samples.csv"), s.field.samples);
  ojson j;
  j["command"] = "flow-norms";
  j["model"] = s.model.describe();
  j["hypersurface"] = s.sigma.name();
  j["n_samples"] = s.field.samples.size();
  j["failures"] = s.field.failures;
  ojson per_t = ojson::array();
  double top = 0.0, top_t = 0.0;
  for (std::size_t i = 0; i < s.field.ts.size(); ++i) {
    ojson row;
    row["t"] = s.field.ts[i];
    row["sup_norm"] = curvature_json(s.field.sup_norm[i]);
    row["spread"] = curvature_json(s.field.spread[i]);
    per_t.push_back(row);
    if (s.field.sup_norm[i] > top) {
      top = s.field.sup_norm[i];
      top_t = s.field.ts[i];
    }
  }
  j["per_t"] = per_t;
  j["seed"] = ctx.seed;
  write_json(ctx.file("flow_norms_summary.json"), j);
  ctx.result.summary = "flow-norms: max sup norm " + fmt("%.6g", top) + " at t=" + fmt("%.6g", top_t);
  if (s.field.failures > 0) {
    throw NumericalError(std::to_string(s.field.failures) + " samples failed to integrate");
  }
}

void cmd_growth_fit(Context& ctx) {
  const Sampled s = sample_field(ctx);
  const double t_min = value_or<double>(ctx.cfg, "t_min", 2.0);
  double b = 0.0;
  if (ctx.cfg.contains("b") && ctx.cfg.at("b").is_number()) {
    b = ctx.cfg.at("b").get<double>();
  } else if (value_or<std::string>(ctx.cfg, "b", "auto") == "auto") {
    b = std::sqrt(std::max(1.0, -curvature_floor(s.model, s.qs, ctx.seed, ctx.workers)));
  } else {
    throw ConfigError("b must be a number or \"auto\"");
  }
  if (!(b >= 1.0)) throw ConfigError("b must be >= 1");

  write_growth_samples(ctx.file("growth_samples.csv"), s.field.samples);
  if (s.field.failures > 0) {
    throw NumericalError(std::to_string(s.field.failures) + " samples failed to integrate");
  }
  GrowthFit fit;
  try {
    fit = fit_growth_exponent(s.field.samples, t_min);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const BoundReport bounds = bound_report(s.field.samples, fit, b);
  write_growth_fit(ctx.file("growth_fit.csv"), fit);

  ojson j;
  j["beta_hat"] = fit.beta_hat;
  j["logC_hat"] = fit.logC_hat;
  j["residual_rms"] = fit.residual_rms;
  j["t_min"] = fit.t_min;
  j["t_max"] = fit.t_max;
  j["side"] = fit.side;
  j["ci_low"] = fit.ci_low;
  j["ci_high"] = fit.ci_high;
  j["b"] = b;
  j["C_emp"] = bounds.C_emp;
  j["c_emp"] = bounds.c_emp;
  j["lemma32_ok"] = bounds.lemma32_ok;
  j["lemma33_ok"] = bounds.lemma33_ok;
  j["violations"] = bounds.violations;
  j["n_samples"] = bounds.n;
  j["model"] = s.model.describe();
  j["hypersurface"] = s.sigma.name();
  j["seed"] = ctx.seed;
  write_json(ctx.file("growth_summary.json"), j);

  ctx.result.summary = "growth-fit: beta_hat=" + fmt("%.3f", fit.beta_hat) + " (95% CI [" + fmt("%.4f", fit.ci_low) +
                       ", " + fmt("%.4f", fit.ci_high) + "]) C_emp=" + fmt("%.4g", bounds.C_emp) +
                       " c_emp=" + fmt("%.4g", bounds.c_emp);
  if (!bounds.lemma33_ok || !bounds.lemma32_ok || bounds.violations > 0) {
    throw ValidationFailure("growth bounds violated");
  }
}

void cmd_distance_check(Context& ctx) {
  const MetricModel model = parse_model(ctx.cfg.at("model"), ctx.workers);
  const json& pcfg = section(ctx.cfg, "pairs");
  PairSampler sampler;
  sampler.n_pairs = value_or<std::size_t>(pcfg, "n_pairs", 100);
  sampler.base_radius = value_or<double>(pcfg, "base_radius", 4.0);
  sampler.t_max = value_or<double>(pcfg, "t_max", 2.0);
  sampler.seed = ctx.seed;
  const double max_rel = value_or<double>(ctx.cfg, "max_rel_error", 1e-5);
  const BvpOptions bvp = parse_bvp(ctx.cfg, ctx.tol);

  std::vector<std::pair<Point, Point>> pairs;
  if (model.as<UpperHalfSpace>()) {
    for (std::size_t i = 0; i < sampler.n_pairs; ++i) {
      pairs.emplace_back(Point(sample_base_point(model.dim(), sampler.base_radius, derive_seed(ctx.seed, 2 * i))),
                         Point(sample_base_point(model.dim(), sampler.base_radius, derive_seed(ctx.seed, 2 * i + 1))));
    }
  } else if (model.as<WarpedSlice>()) {
    pairs = sample_pairs(model.dim() - 1, sampler);
  } else {
    throw ConfigError("distance-check needs a model with a closed-form distance");
  }
  if (!closed_form_distance(model, pairs.front().first, pairs.front().second)) {
    throw ConfigError("distance-check needs a model with a closed-form distance");
  }

  struct Row {
    double closed = 0.0, bvp = 0.0, rel = 0.0;
    int iterations = 0;
    bool converged = false;
  };
  std::vector<Row> rows(pairs.size());
  parallel_for(pairs.size(), ctx.workers, [&](std::size_t i) {
    Row& r = rows[i];
    r.closed = *closed_form_distance(model, pairs[i].first, pairs[i].second);
    const BvpResult res = geodesic_distance_bvp(model, pairs[i].first, pairs[i].second, bvp);
    r.bvp = res.distance;
    r.iterations = res.iterations;
    r.converged = res.converged;
    r.rel = std::abs(r.bvp - r.closed) / std::max(r.closed, std::numeric_limits<double>::min());
  });

  CsvWriter w(ctx.file("distance_check.csv"), {"pair", "d_closed", "d_bvp", "rel_error", "iterations", "converged"});
  double worst = 0.0;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    w.row({std::to_string(i), format_double(r.closed), format_double(r.bvp), format_double(r.rel),
           std::to_string(r.iterations), r.converged ? "1" : "0"});
    if (r.converged) {
      worst = std::max(worst, r.rel);
    } else {
      ++failed;
    }
  }
  w.close();
  ojson j;
  j["command"] = "distance-check";
  j["model"] = model.describe();
  j["n_pairs"] = rows.size();
  j["n_failed"] = failed;
  j["max_rel_error"] = worst;
  j["seed"] = ctx.seed;
  write_json(ctx.file("distance_check_summary.json"), j);
  ctx.result.summary = "distance-check: max relative distance error " + fmt("%.3g", worst) + " over " +
                       std::to_string(rows.size()) + " pairs";
  if (failed > 0) throw NumericalError(std::to_string(failed) + " boundary value solves did not converge");
  if (worst > max_rel) throw ValidationFailure("BVP and closed-form distances disagree");
}

BaseMap parse_base_map(const json& cfg) {
  const json& f = section(cfg, "base_map");
  const std::string type = value_or<std::string>(f, "type", "identity");
  try {
    if (type == "identity") return BaseMap::identity();
    if (type == "scaling") return BaseMap::scaling(required<double>(f, "lambda"));
    if (type == "radial") return BaseMap::radial(required<double>(f, "a"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown base_map type '" + type + "'");
}

void cmd_distortion(Context& ctx) {
  const MetricModel model = parse_model(ctx.cfg.at("model"), ctx.workers);
  if (!model.as<WarpedSlice>()) throw ConfigError("distortion needs a warped_slice model");
  const Hypersurface sigma = Hypersurface::warped_zero_slice();
  try {
    sigma.check_model(model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const BaseMap f = parse_base_map(ctx.cfg);
  const double beta = value_or<double>(ctx.cfg, "beta", 1.0);
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  const json& pcfg = section(ctx.cfg, "pairs");
  PairSampler sampler;
  sampler.n_pairs = value_or<std::size_t>(pcfg, "n_pairs", 1000);
  sampler.t_max = value_or<double>(pcfg, "t_max", 3.0);
  sampler.base_radius = value_or<double>(pcfg, "base_radius", 3.0);
  sampler.seed = ctx.seed;
  if (sampler.n_pairs == 0) throw ConfigError("pairs.n_pairs must be positive");
  LemmaCheckOptions lo;
  lo.bvp = parse_bvp(ctx.cfg, ctx.tol);
  lo.workers = ctx.workers;

  const DistortionReport rep = lemma_checks(model, sigma, f, beta, sampler, lo);
  write_distortion_pairs(ctx.file("distortion_pairs.csv"), rep);
  ojson j;
  j["C_emp"] = curvature_json(rep.C_emp);
  j["c_emp"] = curvature_json(rep.c_emp);
  j["beta"] = rep.beta;
  j["L"] = rep.L;
  j["n_pairs"] = rep.n_pairs;
  j["seed"] = rep.seed;
  j["n_skipped"] = rep.n_skipped;
  write_json(ctx.file("distortion_summary.json"), j);
  ctx.result.summary = "distortion: C_emp=" + fmt("%.6g", rep.C_emp) + " c_emp=" + fmt("%.6g", rep.c_emp) +
                       " over " + std::to_string(rep.n_pairs - rep.n_skipped) + " pairs";
  if (rep.n_skipped * 10 > rep.n_pairs) {
    throw NumericalError(std::to_string(rep.n_skipped) + " of " + std::to_string(rep.n_pairs) + " pairs failed");
  }
  if (!rep.ok) throw ValidationFailure("distortion constants out of range");
}

void cmd_gt_report(Context& ctx) {
  const json& c = ctx.cfg;
  std::vector<double> ks = number_list(c, "k");
  std::vector<double> rhos = number_list(c, "rho");
  if (ks.empty()) ks = {2.0};
  if (rhos.empty()) throw ConfigError("gt-report needs 'rho'");
  const std::vector<double> r0s = number_list(c, "r0");
  if (!r0s.empty() && r0s.size() != 1 && r0s.size() != rhos.size()) {
    throw ConfigError("r0 must be one number or one per rho");
  }
  const json& g = section(c, "grid");
  GTGrid grid;
  grid.r_eps = value_or<double>(g, "r_eps", grid.r_eps);
  grid.r_max = value_or<double>(g, "r_max", 0.0);
  grid.r_count = value_or<std::size_t>(g, "r_count", grid.r_count);
  grid.fiber_dim = value_or<int>(g, "fiber_dim", grid.fiber_dim);
  grid.random_planes = value_or<std::size_t>(g, "random_planes", grid.random_planes);
  grid.seed = ctx.seed;
  grid.workers = ctx.workers;
  const auto profile_count = value_or<std::size_t>(c, "profile_count", 200);

  std::vector<GTReport> reports;
  std::vector<std::pair<SmoothingSpec, std::vector<ProfileRow>>> profiles;
  for (double kd : ks) {
    if (kd != std::floor(kd)) throw ConfigError("k must be an integer");
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      SmoothingSpec spec = SmoothingSpec::with_quarter_r0(static_cast<int>(kd), rhos[i]);
      if (!r0s.empty()) spec.r0 = r0s.size() == 1 ? r0s[0] : r0s[i];
      spec.profile = value_or<std::string>(c, "profile", spec.profile);
      try {
        spec.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      reports.push_back(pinching_report(spec, grid));
      const double hi = grid.r_max > 0.0 ? grid.r_max : spec.rho + 1.0;
      profiles.emplace_back(spec, curvature_profile(build_sigma(spec), grid.r_eps, hi, profile_count));
    }
  }
  write_gt_pinching(ctx.file("gt_pinching.csv"), reports);
  write_gt_profile(ctx.file("gt_curvature_profile.csv"), profiles);

  ojson j;
  j["command"] = "gt-report";
  ojson arr = ojson::array();
  std::string list;
  bool all_pinched = true;
  for (const auto& r : reports) {
    ojson row;
    row["k"] = r.spec.k;
    row["r0"] = r.spec.r0;
    row["rho"] = r.spec.rho;
    row["kappa_min"] = r.kappa_min;
    row["kappa_max"] = r.kappa_max;
    row["pinch_C"] = curvature_json(r.pinch_C);
    row["status"] = r.status;
    if (r.pinched) {
      const Rescaling rs = rescale_to_pinched(r);
      row["lambda"] = rs.lambda;
      row["epsilon"] = rs.epsilon;
    }
    arr.push_back(row);
    all_pinched = all_pinched && r.pinched;
    if (!list.empty()) list += ", ";
    list += fmt("%.3f", r.pinch_C);
  }
  j["reports"] = arr;
  j["seed"] = ctx.seed;
  write_json(ctx.file("gt_summary.json"), j);
  ctx.result.summary = "gt-report: pinch_C=" + (reports.size() == 1 ? list : "[" + list + "]");
  if (!all_pinched) throw ValidationFailure("nonnegative curvature found; metric is not pinched");
}

}  // namespace

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

SmoothingSpec parse_smoothing(const json& spec) {
  SmoothingSpec s;
  s.k = required<int>(spec, "k");
  s.rho = required<double>(spec, "rho");
  s.r0 = value_or<double>(spec, "r0", s.rho / 4.0);
  s.profile = value_or<std::string>(spec, "profile", s.profile);
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

MetricModel parse_model(const json& spec, unsigned workers) {
  if (!spec.is_object()) throw ConfigError("model must be an object");
  const std::string type = required<std::string>(spec, "type");
  const double scale = value_or<double>(spec, "scale", 1.0);
  if (!(scale > 0.0)) throw ConfigError("model.scale must be positive");
  try {
    if (type == "upper_half_space") {
      return MetricModel::upper_half_space(required<int>(spec, "dim"), value_or<double>(spec, "b", 1.0)).rescaled(scale);
    }
    if (type == "warped_slice") {
      const std::string warp = value_or<std::string>(spec, "warp", "cosh");
      if (warp != "cosh") throw ConfigError("warped_slice supports warp \"cosh\" only");
      return MetricModel::hyperbolic_fermi(required<int>(spec, "base_dim"), value_or<double>(spec, "b", 1.0))
          .rescaled(scale);
    }
    if (type == "cone_chart") {
      const int fiber_dim = value_or<int>(spec, "fiber_dim", 1);
      const double r_eps = value_or<double>(spec, "r_eps", 1e-3);
      const json& sig = section(spec, "sigma");
      const std::string stype = value_or<std::string>(sig, "type", "sinh");
      const std::string rescale = value_or<std::string>(spec, "rescale", "none");
      if (rescale != "none" && rescale != "pinched") throw ConfigError("model.rescale must be \"none\" or \"pinched\"");
      if (stype == "sinh") {
        if (rescale == "pinched") throw ConfigError("rescale \"pinched\" needs a gt sigma");
        return MetricModel::cone_chart(fiber_dim, SmoothFunction1D::sinh(), value_or<double>(spec, "r_max", 20.0), r_eps)
            .rescaled(scale);
      }
      if (stype != "gt") throw ConfigError("unknown sigma type '" + stype + "'");
      const SmoothingSpec s = parse_smoothing(sig);
      MetricModel m = gt_cone_model(s, fiber_dim, value_or<double>(spec, "r_max", s.rho + 1.0), r_eps);
      if (rescale == "pinched") {
        GTGrid grid;
        grid.r_eps = r_eps;
        grid.fiber_dim = fiber_dim;
        grid.workers = workers;
        const GTReport rep = pinching_report(s, grid);
        if (!rep.pinched) throw ValidationFailure("cannot rescale: smoothed metric is not negatively curved");
        m = m.rescaled(rescale_to_pinched(rep).lambda);
      }
      return m.rescaled(scale);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid model: ") + e.what());
  }
  throw ConfigError("unknown model type '" + type + "'");
}

RunResult run(const json& config, const std::filesystem::path& out_dir, const Overrides& overrides) {
  RunResult result;
  try {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    const int version = required<int>(config, "schema_version");
    if (version != kSchemaVersion) {
      throw ConfigError("unsupported schema_version " + std::to_string(version) + " (expected " +
                        std::to_string(kSchemaVersion) + ")");
    }
    const std::string command = required<std::string>(config, "command");
    if (!config.contains("model") && command != "gt-report") throw ConfigError("missing field 'model'");

    Context ctx{config, out_dir, 0, 0, 1e-10, result};
    ctx.seed = overrides.seed.value_or(value_or<std::uint64_t>(config, "seed", 0));
    ctx.workers = overrides.workers.value_or(value_or<unsigned>(config, "workers", 0));
    ctx.tol = overrides.tol.value_or(value_or<double>(config, "tol", 1e-10));
    if (!(ctx.tol > 0.0)) throw ConfigError("tol must be positive");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    if (command == "curvature") {
      cmd_curvature(ctx);
    } else if (command == "flow-norms") {
      cmd_flow_norms(ctx);
    } else if (command == "growth-fit") {
      cmd_growth_fit(ctx);
    } else if (command == "distance-check") {
      cmd_distance_check(ctx);
    } else if (command == "distortion") {
      cmd_distortion(ctx);
    } else if (command == "gt-report") {
      cmd_gt_report(ctx);
    } else {
      throw ConfigError("unknown command '" + command + "'");
    }
  } catch (const ConfigError& e) {
    result.exit_code = kExitConfig;
    result.diagnostic = std::string("config error: ") + e.what();
  } catch (const json::exception& e) {
    result.exit_code = kExitConfig;
    result.diagnostic = std::string("config error: ") + e.what();
  } catch (const ValidationFailure& e) {
    result.exit_code = kExitValidation;
    result.diagnostic = std::string("validation failed: ") + e.what();
  } catch (const std::invalid_argument& e) {
    result.exit_code = kExitConfig;
    result.diagnostic = std::string("invalid input: ") + e.what();
  } catch (const std::exception& e) {
    result.exit_code = kExitNumerical;
    result.diagnostic = std::string("numerical failure: ") + e.what();
  }
  return result;
}

}  // namespace pinchlab::cli
