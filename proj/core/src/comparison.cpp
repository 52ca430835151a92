#include "pinchlab/comparison.hpp"

#include "pinchlab/parallel.hpp"
#include "pinchlab/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace pinchlab {

double hyperbolic_distance(const Vec& p, const Vec& pp, double b) {
  if (p.size() != pp.size() || p.size() < 1) throw std::invalid_argument("hyperbolic_distance: dimension mismatch");
  if (!(b > 0.0)) throw std::invalid_argument("hyperbolic_distance: b must be positive");
  const Eigen::Index n = p.size();
  const double y = p[n - 1];
  const double yp = pp[n - 1];
  if (!(y > 0.0) || !(yp > 0.0)) throw DomainError("hyperbolic_distance: height coordinate must be positive");
  // arcosh(1 + |d|^2 / (2 y y')) written without cancellation
  const double s = (p - pp).squaredNorm() / (4.0 * y * yp);
  return 2.0 / b * std::asinh(std::sqrt(s));
}

double warped_distance(double t, double tp, double d0, double b) {
  if (!(d0 >= 0.0)) throw std::invalid_argument("warped_distance: base distance must be nonnegative");
  if (!(b > 0.0)) throw std::invalid_argument("warped_distance: b must be positive");
  // cosh d = cosh t cosh t' cosh d0 - sinh t sinh t' in curvature -1, rearranged as
  // sinh^2(d/2) = sinh^2((t-t')/2) + cosh t cosh t' sinh^2(d0/2).
  const double u = b * t, up = b * tp, e = b * d0;
  const double a = std::sinh(0.5 * (u - up));
  const double c = std::sinh(0.5 * e);
  const double arg = a * a + std::cosh(u) * std::cosh(up) * c * c;
  if (!std::isfinite(arg) || arg < -1e-12) throw NumericalError("warped_distance: invalid argument");
  return 2.0 / b * std::asinh(std::sqrt(std::max(arg, 0.0)));
}

std::optional<double> closed_form_distance(const MetricModel& model, const Point& p, const Point& pp) {
  model.check_domain(p);
  model.check_domain(pp);
  const double lambda = model.scale();
  if (const auto* u = model.as<UpperHalfSpace>()) {
    return lambda * hyperbolic_distance(p.coords, pp.coords, u->b);
  }
  if (const auto* w = model.as<WarpedSlice>()) {
    if (w->warp.family() != SmoothFunction1D::Family::Cosh || w->warp.rate() != w->base.b) return std::nullopt;
    const int n = w->base.dim;
    const double d0 = hyperbolic_distance(p.coords.head(n), pp.coords.head(n), w->base.b);
    return lambda * warped_distance(p[n], pp[n], d0, w->base.b);
  }
  return std::nullopt;
}

namespace {

struct Shooter {
  const MetricModel& model;
  const Point& p;
  FlowOptions flow;

  bool operator()(const Vec& w, const Vec& target, Vec& F) const {
    try {
      const Point e = exp_map(model, p, w, flow);
      F = e.coords - target;
      return F.allFinite();
    } catch (const DomainError&) {
      return false;
    } catch (const IntegrationError&) {
      return false;
    }
  }
};

struct NewtonOutcome {
  bool converged = false;
  Vec w;
  int iterations = 0;
  double error = std::numeric_limits<double>::infinity();
};

NewtonOutcome newton(const Shooter& shoot, Vec w, const Vec& target, double tol, int max_iterations) {
  NewtonOutcome out;
  const Eigen::Index d = w.size();
  Vec F;
  if (!shoot(w, target, F)) {
    out.w = w;
    return out;
  }
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it;
    out.error = F.lpNorm<Eigen::Infinity>();
    if (out.error <= tol) {
      out.converged = true;
      out.w = w;
      return out;
    }
    const double h = 1e-6 * std::max(1.0, w.lpNorm<Eigen::Infinity>());
    Mat Jac(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      Vec wp = w, wm = w, Fp, Fm;
      wp[i] += h;
      wm[i] -= h;
      const bool okp = shoot(wp, target, Fp);
      const bool okm = shoot(wm, target, Fm);
      if (okp && okm) {
        Jac.col(i) = (Fp - Fm) / (2.0 * h);
      } else if (okp) {
        Jac.col(i) = (Fp - F) / h;
      } else if (okm) {
        Jac.col(i) = (F - Fm) / h;
      } else {
        out.w = w;
        return out;
      }
    }
    const Vec step = Jac.colPivHouseholderQr().solve(-F);
    if (!step.allFinite()) break;
    const double f0 = F.norm();
    bool accepted = false;
    double alpha = 1.0;
    for (int k = 0; k < 30; ++k, alpha *= 0.5) {
      Vec Fn;
      const Vec wn = w + alpha * step;
      if (shoot(wn, target, Fn) && Fn.norm() < f0) {
        w = wn;
        F = Fn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.error = F.lpNorm<Eigen::Infinity>();
  out.converged = out.error <= tol;
  out.w = w;
  out.iterations = std::max(out.iterations, 1);
  return out;
}

}  // namespace

BvpResult geodesic_distance_bvp(const MetricModel& model, const Point& p, const Point& pp, const BvpOptions& options) {
  model.check_domain(p);
  model.check_domain(pp);
  if (!(options.tol > 0.0) || !(options.integration_tol > 0.0) || options.max_iterations < 1) {
    throw std::invalid_argument("geodesic_distance_bvp: invalid options");
  }
  BvpResult result;
  const int d = model.dim();
  result.initial_direction = TangentVector{p, Vec::Zero(d)};
  if (p.coords == pp.coords) {
    result.converged = true;
    return result;
  }
  const double tol = options.tol * std::max(1.0, pp.coords.lpNorm<Eigen::Infinity>());
  Shooter shoot{model, p, FlowOptions{options.integration_tol, 1000000}};

  const Vec chord = pp.coords - p.coords;
  NewtonOutcome best = newton(shoot, chord, pp.coords, tol, options.max_iterations);
  int used = best.iterations;
  for (int substeps : {4, 8, 16}) {
    if (best.converged) break;
    Vec w = chord / substeps;
    NewtonOutcome stage;
    int spent = 0;
    for (int k = 1; k <= substeps; ++k) {
      const Vec target = p.coords + chord * (static_cast<double>(k) / substeps);
      const Vec seed = k == 1 ? w : Vec(w * (static_cast<double>(k) / (k - 1)));
      stage = newton(shoot, seed, target, tol, options.max_iterations);
      spent += stage.iterations;
      if (!stage.converged) break;
      w = stage.w;
    }
    used += spent;
    if (stage.converged) best = stage;
  }
  result.iterations = used;
  result.converged = best.converged;
  result.endpoint_error = best.error;
  if (best.w.size() == d) {
    result.distance = norm(model, p, best.w);
    if (result.distance > 0.0) result.initial_direction.components = best.w / result.distance;
  }
  return result;
}

double model_distance(const MetricModel& model, const Point& p, const Point& pp, const BvpOptions& options) {
  if (auto d = closed_form_distance(model, p, pp)) return *d;
  const BvpResult r = geodesic_distance_bvp(model, p, pp, options);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "geodesic_distance_bvp did not converge (endpoint error " << r.endpoint_error << ")";
    throw NumericalError(msg.str());
  }
  return r.distance;
}

BaseMap BaseMap::scaling(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("BaseMap::scaling: lambda must be positive");
  return BaseMap(Kind::Scaling, lambda);
}

BaseMap BaseMap::radial(double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("BaseMap::radial: a must be nonnegative");
  return BaseMap(Kind::Radial, a);
}

std::string BaseMap::name() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Identity:
      out << "identity";
      break;
    case Kind::Scaling:
      out << "scaling(" << param_ << ")";
      break;
    case Kind::Radial:
      out << "radial(" << param_ << ")";
      break;
  }
  return out.str();
}

Vec half_space_to_ball(const Vec& q) {
  const Eigen::Index n = q.size();
  const double y = q[n - 1];
  if (!(y > 0.0)) throw DomainError("half_space_to_ball: height must be positive");
  const double x2 = q.head(n - 1).squaredNorm();
  const double den = x2 + (y + 1.0) * (y + 1.0);
  Vec z(n);
  z.head(n - 1) = 2.0 * q.head(n - 1) / den;
  z[n - 1] = (x2 + y * y - 1.0) / den;
  return z;
}

Vec ball_to_half_space(const Vec& z) {
  const Eigen::Index n = z.size();
  const double s = z[n - 1];
  const double den = z.head(n - 1).squaredNorm() + (1.0 - s) * (1.0 - s);
  if (!(z.squaredNorm() < 1.0) || !(den > 0.0)) throw DomainError("ball_to_half_space: point outside the open ball");
  Vec q(n);
  q.head(n - 1) = 2.0 * z.head(n - 1) / den;
  q[n - 1] = (1.0 - z.squaredNorm()) / den;
  return q;
}

Vec BaseMap::operator()(const Vec& q) const {
  if (q.size() < 1 || !(q[q.size() - 1] > 0.0)) throw DomainError("BaseMap: point outside the half-space");
  switch (kind_) {
    case Kind::Identity:
      return q;
    case Kind::Scaling:
      return param_ * q;
    case Kind::Radial: {
      const Vec z = half_space_to_ball(q);
      const double r = z.norm();
      if (r == 0.0 || param_ == 0.0) return q;
      const double rho = 2.0 * std::atanh(r);
      const double stretched = rho + param_ * std::tanh(rho);
      return ball_to_half_space(z * (std::tanh(0.5 * stretched) / r));
    }
  }
  return q;
}

double BaseMap::lipschitz() const { return kind_ == Kind::Radial ? std::exp(param_) : 1.0; }

Point flow_map_F(const Vec& q, double t, const BaseMap& f, double beta) {
  const Vec fq = f(q);
  Vec out(fq.size() + 1);
  out.head(fq.size()) = fq;
  out[fq.size()] = beta * t;
  return Point(std::move(out));
}

namespace {

Vec base_point_from(int base_dim, double radius, SplitMix64& rng) {
  Vec dir(base_dim);
  double n2 = 0.0;
  do {
    for (int i = 0; i < base_dim; ++i) {
      // Box-Muller normal variates give a uniform direction.
      const double u1 = 1.0 - rng.uniform();
      const double u2 = rng.uniform();
      dir[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    n2 = dir.squaredNorm();
  } while (!(n2 > 1e-24));
  dir /= std::sqrt(n2);
  const double rho = rng.uniform(0.0, radius);
  return ball_to_half_space(dir * std::tanh(0.5 * rho));
}

}  // namespace

Vec sample_base_point(int base_dim, double radius, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return base_point_from(base_dim, radius, rng);
}

std::vector<std::pair<Point, Point>> sample_pairs(int base_dim, const PairSampler& sampler) {
  if (base_dim < 1) throw std::invalid_argument("sample_pairs: base dimension must be positive");
  if (!(sampler.t_max >= 0.0) || !(sampler.base_radius >= 0.0)) throw std::invalid_argument("sample_pairs: negative box");
  std::vector<std::pair<Point, Point>> out;
  out.reserve(sampler.n_pairs);
  for (std::size_t i = 0; i < sampler.n_pairs; ++i) {
    SplitMix64 rng(derive_seed(sampler.seed, i));
    Point pts[2];
    for (auto& pt : pts) {
      Vec x(base_dim + 1);
      x.head(base_dim) = base_point_from(base_dim, sampler.base_radius, rng);
      x[base_dim] = rng.uniform(-sampler.t_max, sampler.t_max);
      pt = Point(std::move(x));
    }
    out.emplace_back(std::move(pts[0]), std::move(pts[1]));
  }
  return out;
}

DistortionReport lemma_checks(const MetricModel& X, const Hypersurface& sigma, const BaseMap& f, double beta,
                              const PairSampler& sampler, const LemmaCheckOptions& options) {
  if (sigma.kind() != Hypersurface::Kind::WarpedZeroSlice) {
    throw std::invalid_argument("lemma_checks: Sigma must be the zero slice of a WarpedSlice model");
  }
  sigma.check_model(X);
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("lemma_checks: beta must be positive");
  if (sampler.n_pairs == 0) throw std::invalid_argument("lemma_checks: no pairs requested");
  const auto* w = X.as<WarpedSlice>();
  const int n = w->base.dim;
  const double lambda = X.scale();
  // Sigma is H^n of curvature -(b/lambda)^2 in half-space coordinates.
  const double homothety = w->base.b / lambda;

  DistortionReport rep;
  rep.beta = beta;
  rep.seed = sampler.seed;
  rep.n_pairs = sampler.n_pairs;
  rep.L = f.lipschitz() * std::max(homothety, 1.0 / homothety);

  const auto pairs = sample_pairs(n, sampler);
  rep.pairs.resize(pairs.size());
  parallel_for(pairs.size(), options.workers, [&](std::size_t i) {
    DistortionPair& out = rep.pairs[i];
    out.p = pairs[i].first;
    out.pp = pairs[i].second;
    try {
      out.d_X = model_distance(X, out.p, out.pp, options.bvp);
      const Vec q = out.p.coords.head(n), qp = out.pp.coords.head(n);
      const double t = lambda * out.p[n], tp = lambda * out.pp[n];
      const double d0 = hyperbolic_distance(f(q), f(qp), 1.0);
      out.d_H_beta = warped_distance(beta * t, beta * tp, d0, 1.0);
      out.d_H_1 = warped_distance(t, tp, d0, 1.0);
      if (!(out.d_H_beta > 0.0) || !(out.d_H_1 > 0.0) || !(out.d_X > 0.0)) {
        out.error = "coincident points";
        return;
      }
      out.ratio41 = out.d_X / out.d_H_beta;
      out.ratio42 = out.d_X / out.d_H_1;
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  rep.C_emp = -std::numeric_limits<double>::infinity();
  rep.c_emp = std::numeric_limits<double>::infinity();
  for (const auto& pr : rep.pairs) {
    if (!pr.ok) {
      ++rep.n_skipped;
      continue;
    }
    rep.C_emp = std::max(rep.C_emp, pr.ratio41);
    rep.c_emp = std::min(rep.c_emp, pr.ratio42);
  }
  rep.ok = rep.n_skipped * 10 <= rep.n_pairs && std::isfinite(rep.C_emp) && rep.c_emp > 0.0 &&
           std::isfinite(rep.c_emp);
  return rep;
}

}  // namespace pinchlab
