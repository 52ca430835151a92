#include "pinchlab/flow.hpp"

#include "pinchlab/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pinchlab {

namespace {

// Gamma(v, e)^k for a diagonal metric jet.
Vec connection(const DiagonalJet& jet, const Vec& v, const Vec& e) {
  const Vec dv = jet.dg * v;
  const Vec de = jet.dg * e;
  const Vec ve = v.cwiseProduct(e);
  return (e.cwiseProduct(dv) + v.cwiseProduct(de) - jet.dg.transpose() * ve).cwiseQuotient(2.0 * jet.g);
}

OdeOptions ode_options(const FlowOptions& o) {
  OdeOptions opt;
  opt.rtol = o.tol;
  opt.atol = o.tol;
  opt.max_steps = o.max_steps;
  return opt;
}

// Packed layout: x(d) v(d) E(d*d) J(m*k) Jp(m*k) U(m*m), m = d - 1, all
// matrices column-major.
struct Layout {
  int d = 0;
  int k = 0;
  bool frame = false;
  bool riccati = false;

  int m() const { return d - 1; }
  int x() const { return 0; }
  int v() const { return d; }
  int E() const { return 2 * d; }
  int J() const { return E() + (frame ? d * d : 0); }
  int Jp() const { return J() + m() * k; }
  int U() const { return Jp() + m() * k; }
  int size() const { return U() + (riccati ? m() * m() : 0); }
};

Vec pack(const Layout& L, const TransportState& s) {
  Vec y(L.size());
  y.segment(L.x(), L.d) = s.p.coords;
  y.segment(L.v(), L.d) = s.v;
  if (L.frame) y.segment(L.E(), L.d * L.d) = Eigen::Map<const Vec>(s.frame.data(), L.d * L.d);
  if (L.k > 0) {
    y.segment(L.J(), L.m() * L.k) = Eigen::Map<const Vec>(s.J.data(), L.m() * L.k);
    y.segment(L.Jp(), L.m() * L.k) = Eigen::Map<const Vec>(s.Jp.data(), L.m() * L.k);
  }
  if (L.riccati) y.segment(L.U(), L.m() * L.m()) = Eigen::Map<const Vec>(s.U.data(), L.m() * L.m());
  return y;
}

TransportState unpack(const Layout& L, double t, const Vec& y) {
  TransportState s;
  s.t = t;
  s.p = Point(Vec(y.segment(L.x(), L.d)));
  s.v = y.segment(L.v(), L.d);
  if (L.frame) s.frame = Eigen::Map<const Mat>(y.data() + L.E(), L.d, L.d);
  if (L.k > 0) {
    s.J = Eigen::Map<const Mat>(y.data() + L.J(), L.m(), L.k);
    s.Jp = Eigen::Map<const Mat>(y.data() + L.Jp(), L.m(), L.k);
  } else {
    s.J = Mat(L.m(), 0);
    s.Jp = Mat(L.m(), 0);
  }
  if (L.riccati) s.U = Eigen::Map<const Mat>(y.data() + L.U(), L.m(), L.m());
  return s;
}

OdeRhs make_rhs(const MetricModel& model, const Layout& L) {
  return [&model, L](double, const Vec& y, Vec& dy) -> bool {
    const Point p(Vec(y.segment(L.x(), L.d)));
    if (!model.contains(p)) return false;
    try {
      const DiagonalJet jet = diagonal_jet(model, p, false);
      const Vec v = y.segment(L.v(), L.d);
      dy.resize(L.size());
      dy.segment(L.x(), L.d) = v;
      dy.segment(L.v(), L.d) = -connection(jet, v, v);
      if (!L.frame) return true;
      const Eigen::Map<const Mat> E(y.data() + L.E(), L.d, L.d);
      for (int a = 0; a < L.d; ++a) {
        dy.segment(L.E() + a * L.d, L.d) = -connection(jet, v, E.col(a));
      }
      if (L.k == 0 && !L.riccati) return true;
      const Mat A = frame_curvature(model, p, v, E);
      if (L.k > 0) {
        const Eigen::Map<const Mat> J(y.data() + L.J(), L.m(), L.k);
        dy.segment(L.J(), L.m() * L.k) = y.segment(L.Jp(), L.m() * L.k);
        const Mat ddJ = -A * J;
        dy.segment(L.Jp(), L.m() * L.k) = Eigen::Map<const Vec>(ddJ.data(), L.m() * L.k);
      }
      if (L.riccati) {
        const Eigen::Map<const Mat> U(y.data() + L.U(), L.m(), L.m());
        const Mat dU = -U * U - A;
        dy.segment(L.U(), L.m() * L.m()) = Eigen::Map<const Vec>(dU.data(), L.m() * L.m());
      }
      return true;
    } catch (const DomainError&) {
      return false;
    }
  };
}

void check_times(double t0, const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("no output times requested");
  const double dir = times.back() >= t0 ? 1.0 : -1.0;
  double prev = t0;
  for (double t : times) {
    if (!std::isfinite(t) || (t - prev) * dir < 0.0) {
      throw std::invalid_argument("output times must be finite and monotone away from the start time");
    }
    prev = t;
  }
}

void throw_on_failure(OdeStatus status, const std::string& what) {
  if (status == OdeStatus::Ok) return;
  std::ostringstream msg;
  msg << what << ": integration stopped (" << to_string(status) << ")";
  if (status == OdeStatus::DomainExit) throw DomainError(msg.str());
  throw IntegrationError(msg.str());
}

double euclid_norm_max_singular(const Mat& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

}  // namespace

GeodesicPath integrate_geodesic(const MetricModel& model, const PhaseState& start, double T,
                                const FlowOptions& options, std::vector<double> samples) {
  model.check_domain(start.p);
  if (start.v.size() != model.dim()) throw std::invalid_argument("integrate_geodesic: velocity dimension mismatch");
  if (!(options.tol > 0.0)) throw std::invalid_argument("integrate_geodesic: tol must be positive");
  if (!std::isfinite(T)) throw std::invalid_argument("integrate_geodesic: T must be finite");
  if (samples.empty()) {
    samples.push_back(0.0);
    if (T != 0.0) samples.push_back(T);
  }
  check_times(0.0, samples);
  if ((samples.back() - T) * (T >= 0 ? 1.0 : -1.0) > 0.0) {
    throw std::invalid_argument("integrate_geodesic: sample beyond T");
  }

  Layout L;
  L.d = model.dim();
  TransportState s0;
  s0.p = start.p;
  s0.v = start.v;
  const Vec y0 = pack(L, s0);
  const OdeSolution sol = integrate_dopri5(make_rhs(model, L), 0.0, y0, T, samples, ode_options(options));

  GeodesicPath path;
  path.status = sol.status;
  path.speed0 = norm(model, start.p, start.v);
  auto record = [&](double t, const Vec& y) {
    const TransportState s = unpack(L, t, y);
    path.times.push_back(t);
    path.states.push_back(PhaseState{s.p, s.v});
    if (model.contains(s.p)) {
      path.speed_drift = std::max(path.speed_drift, std::abs(norm(model, s.p, s.v) - path.speed0));
    }
  };
  for (std::size_t i = 0; i < sol.times.size(); ++i) record(sol.times[i], sol.states[i]);
  if (sol.status != OdeStatus::Ok && (path.times.empty() || sol.t_last != path.times.back())) {
    record(sol.t_last, sol.y_last);
  }
  return path;
}

Point exp_map(const MetricModel& model, const Point& p, const Vec& w, const FlowOptions& options) {
  model.check_domain(p);
  const double len = norm(model, p, w);
  if (len == 0.0) return p;
  const GeodesicPath path = integrate_geodesic(model, PhaseState{p, w / len}, len, options);
  throw_on_failure(path.status, "exp_map");
  return path.end().p;
}

Mat orthonormal_frame(const MetricModel& model, const Point& p, const Vec& v) {
  const int d = model.dim();
  const Vec g = diagonal_jet(model, p, false).g;
  auto ip = [&](const Vec& a, const Vec& b) { return (g.array() * a.array() * b.array()).sum(); };
  const double vn = std::sqrt(ip(v, v));
  if (!(vn > 0.0)) throw std::invalid_argument("orthonormal_frame: zero velocity");
  Mat E(d, d);
  E.col(0) = v / vn;
  int filled = 1;
  for (int i = 0; i < d && filled < d; ++i) {
    Vec u = Vec::Unit(d, i);
    const double before = std::sqrt(ip(u, u));
    for (int pass = 0; pass < 2; ++pass) {
      for (int c = 0; c < filled; ++c) u -= ip(u, E.col(c)) * E.col(c);
    }
    const double un = std::sqrt(ip(u, u));
    if (un > 1e-6 * before) E.col(filled++) = u / un;
  }
  if (filled != d) throw NumericalError("orthonormal_frame: Gram-Schmidt failed");
  return E;
}

Mat frame_curvature(const MetricModel& model, const Point& p, const Vec& v, const Mat& frame) {
  return jacobi_operator(model, p, v, frame.rightCols(frame.cols() - 1));
}

TransportResult transport(const MetricModel& model, const TransportState& initial, const std::vector<double>& times,
                          const FlowOptions& options) {
  model.check_domain(initial.p);
  const int d = model.dim();
  Layout L;
  L.d = d;
  L.frame = true;
  L.k = static_cast<int>(initial.J.cols());
  L.riccati = initial.U.size() > 0;
  if (initial.frame.rows() != d || initial.frame.cols() != d) throw std::invalid_argument("transport: frame must be d x d");
  if (L.k > 0 && (initial.J.rows() != d - 1 || initial.Jp.rows() != d - 1 || initial.Jp.cols() != L.k)) {
    throw std::invalid_argument("transport: Jacobi data must have d-1 rows");
  }
  if (L.riccati && (initial.U.rows() != d - 1 || initial.U.cols() != d - 1)) {
    throw std::invalid_argument("transport: Riccati matrix must be (d-1) x (d-1)");
  }
  check_times(initial.t, times);

  const OdeSolution sol =
      integrate_dopri5(make_rhs(model, L), initial.t, pack(L, initial), times.back(), times, ode_options(options));
  TransportResult out;
  out.status = sol.status;
  for (std::size_t i = 0; i < sol.times.size(); ++i) out.states.push_back(unpack(L, sol.times[i], sol.states[i]));
  return out;
}

JacobiResult propagate_jacobi(const MetricModel& model, const PhaseState& start, const JacobiState& init, double T,
                              const FlowOptions& options) {
  model.check_domain(start.p);
  const int d = model.dim();
  if (init.J.components.size() != d || init.Jprime.components.size() != d) {
    throw std::invalid_argument("propagate_jacobi: Jacobi data dimension mismatch");
  }
  const Vec g = diagonal_jet(model, start.p, false).g;
  auto ip = [&](const Vec& a, const Vec& b) { return (g.array() * a.array() * b.array()).sum(); };
  const double vn = std::sqrt(ip(start.v, start.v));
  for (const Vec* w : {&init.J.components, &init.Jprime.components}) {
    const double wn = std::sqrt(ip(*w, *w));
    if (std::abs(ip(*w, start.v)) > 1e-8 * wn * vn + 1e-300) {
      throw std::invalid_argument("propagate_jacobi: initial data must be orthogonal to the velocity");
    }
  }

  TransportState s0;
  s0.p = start.p;
  s0.v = start.v;
  s0.frame = orthonormal_frame(model, start.p, start.v);
  const Mat Eperp = s0.frame.rightCols(d - 1);
  s0.J = Eperp.transpose() * g.asDiagonal() * init.J.components;
  s0.Jp = Eperp.transpose() * g.asDiagonal() * init.Jprime.components;

  JacobiResult result;
  if (T == 0.0) {
    result.end = start;
    result.state = init;
    return result;
  }
  constexpr int kSamples = 16;
  std::vector<double> times;
  for (int i = 1; i <= kSamples; ++i) times.push_back(T * i / kSamples);
  const TransportResult tr = transport(model, s0, times, options);
  throw_on_failure(tr.status, "propagate_jacobi");

  for (const auto& s : tr.states) {
    const Vec Jc = s.frame.rightCols(d - 1) * s.J.col(0);
    const Vec gs = diagonal_jet(model, s.p, false).g;
    const double jn = std::sqrt((gs.array() * Jc.array().square()).sum());
    const double sn = std::sqrt((gs.array() * s.v.array().square()).sum());
    if (jn > 0.0) {
      const double c = (gs.array() * Jc.array() * s.v.array()).sum() / (jn * sn);
      result.orthogonality_defect = std::max(result.orthogonality_defect, std::abs(c));
    }
  }
  const TransportState& e = tr.states.back();
  result.end = PhaseState{e.p, e.v};
  result.state.J = TangentVector{e.p, e.frame.rightCols(d - 1) * e.J.col(0)};
  result.state.Jprime = TangentVector{e.p, e.frame.rightCols(d - 1) * e.Jp.col(0)};
  result.status = tr.status;
  return result;
}

JacobiResult propagate_jacobi(const MetricModel& model, const GeodesicPath& path, const JacobiState& init, double T,
                              const FlowOptions& options) {
  if (path.states.empty()) throw std::invalid_argument("propagate_jacobi: empty geodesic path");
  return propagate_jacobi(model, path.states.front(), init, T, options);
}

std::string Hypersurface::name() const {
  switch (kind_) {
    case Kind::WarpedZeroSlice:
      return "warped_zero_slice";
    case Kind::ConeReflectionSlice:
      return "cone_reflection_slice";
    case Kind::HalfSpaceVertical:
      return "half_space_vertical";
  }
  return "unknown";
}

void Hypersurface::check_model(const MetricModel& model) const {
  switch (kind_) {
    case Kind::WarpedZeroSlice: {
      const auto* w = model.as<WarpedSlice>();
      if (w == nullptr) throw std::invalid_argument("warped_zero_slice needs a WarpedSlice model");
      if (!w->warp.in_domain(0.0) || std::abs(w->warp.derivative(0.0)) > 1e-12) {
        throw std::invalid_argument("warped_zero_slice needs warp'(0) = 0 for a totally geodesic slice");
      }
      return;
    }
    case Kind::ConeReflectionSlice:
      if (model.as<ConeChart>() == nullptr) throw std::invalid_argument("cone_reflection_slice needs a ConeChart model");
      return;
    case Kind::HalfSpaceVertical:
      if (model.as<UpperHalfSpace>() == nullptr) {
        throw std::invalid_argument("half_space_vertical needs an UpperHalfSpace model");
      }
      return;
  }
}

int Hypersurface::normal_coordinate(const MetricModel& model) const {
  check_model(model);
  switch (kind_) {
    case Kind::WarpedZeroSlice:
      return model.as<WarpedSlice>()->base.dim;
    case Kind::ConeReflectionSlice:
      return 1;
    case Kind::HalfSpaceVertical:
      return 0;
  }
  return 0;
}

bool Hypersurface::contains(const MetricModel& model, const Point& q, double tol) const {
  const int c = normal_coordinate(model);
  if (!model.contains(q)) return false;
  if (kind_ == Kind::ConeReflectionSlice) return std::abs(std::remainder(q[c], std::numbers::pi)) <= tol;
  return std::abs(q[c]) <= tol;
}

Vec Hypersurface::normal(const MetricModel& model, const Point& q) const {
  const int c = normal_coordinate(model);
  const Vec s = orthonormal_scales(model, q);
  return Vec::Unit(model.dim(), c) / s[c];
}

Mat Hypersurface::tangent_frame(const MetricModel& model, const Point& q) const {
  const int c = normal_coordinate(model);
  const Vec s = orthonormal_scales(model, q);
  const int d = model.dim();
  Mat F = Mat::Zero(d, d - 1);
  for (int i = 0, col = 0; i < d; ++i) {
    if (i == c) continue;
    F(i, col++) = 1.0 / s[i];
  }
  return F;
}

namespace {

void require_on_slice(const MetricModel& model, const Hypersurface& sigma, const Point& q) {
  model.check_domain(q);
  if (!sigma.contains(model, q, 1e-9)) {
    throw std::invalid_argument("point is not on the hypersurface " + sigma.name());
  }
}

}  // namespace

Point normal_flow(const MetricModel& model, const Hypersurface& sigma, const Point& q, double t,
                  const FlowOptions& options) {
  require_on_slice(model, sigma, q);
  if (t == 0.0) return q;
  if (sigma.kind() == Hypersurface::Kind::WarpedZeroSlice) {
    // Normal lines of a warped product are unit-speed geodesics of dt^2.
    Point out = q;
    const int c = sigma.normal_coordinate(model);
    out.coords[c] = t / model.scale();
    model.check_domain(out);
    return out;
  }
  return exp_map(model, q, t * sigma.normal(model, q), options);
}

namespace {

FlowDifferential dphi_impl(const MetricModel& model, const Hypersurface& sigma, const Point& q, double t,
                           const FlowOptions& options) {
  require_on_slice(model, sigma, q);
  const int d = model.dim();
  FlowDifferential out;
  out.base = q;
  out.t = t;
  if (t == 0.0) {
    out.frame_image = Mat::Identity(d - 1, d - 1);
    out.operator_norm = 1.0;
    return out;
  }
  TransportState s0;
  s0.p = q;
  s0.v = sigma.normal(model, q);
  s0.frame.resize(d, d);
  s0.frame.col(0) = s0.v;
  s0.frame.rightCols(d - 1) = sigma.tangent_frame(model, q);
  s0.J = Mat::Identity(d - 1, d - 1);
  s0.Jp = Mat::Zero(d - 1, d - 1);
  const TransportResult tr = transport(model, s0, {t}, options);
  out.status = tr.status;
  if (!tr.complete()) return out;
  out.frame_image = tr.states.back().J;
  out.operator_norm = euclid_norm_max_singular(out.frame_image);
  return out;
}

}  // namespace

FlowDifferential dphi_operator_norm(const MetricModel& model, const Hypersurface& sigma, const Point& q, double t,
                                    const FlowOptions& options) {
  FlowDifferential out = dphi_impl(model, sigma, q, t, options);
  throw_on_failure(out.status, "dphi_operator_norm");
  return out;
}

std::vector<FlowDifferential> dphi_operator_norm_batch(const MetricModel& model, const Hypersurface& sigma,
                                                       const std::vector<Point>& qs, const std::vector<double>& ts,
                                                       const FlowOptions& options, unsigned workers) {
  std::vector<FlowDifferential> out(qs.size() * ts.size());
  parallel_for(out.size(), workers, [&](std::size_t idx) {
    const Point& q = qs[idx / ts.size()];
    const double t = ts[idx % ts.size()];
    try {
      out[idx] = dphi_impl(model, sigma, q, t, options);
      if (out[idx].status != OdeStatus::Ok) out[idx].error = to_string(out[idx].status);
    } catch (const std::exception& e) {
      out[idx].base = q;
      out[idx].t = t;
      out[idx].status = OdeStatus::DomainExit;
      out[idx].error = e.what();
    }
  });
  return out;
}

namespace {

struct HalfSplitting {
  Mat U;
  double residual = 0.0;
  double gap = 0.0;
  OdeStatus status = OdeStatus::Ok;
};

// sign = +1: unstable solution, integrated forward from -horizon.
// sign = -1: stable solution, integrated backward from +horizon.
// The geodesic and frame are computed once outward from s0 and stored at
// anchor times; the Riccati sweep back toward 0 restarts from those anchors
// so that the (unstable) geodesic flow is never integrated over the full
// horizon twice.
HalfSplitting riccati_half(const MetricModel& model, const TransportState& s0, double sign, const RiccatiOptions& o) {
  const int m = model.dim() - 1;
  FlowOptions fo;
  fo.tol = o.tol;
  HalfSplitting out;

  const double anchor_step = 0.5;
  const auto n_anchor = static_cast<std::size_t>(std::ceil(o.horizon / anchor_step));
  std::vector<double> anchor_times(n_anchor);
  for (std::size_t k = 0; k < n_anchor; ++k) {
    anchor_times[k] = -sign * o.horizon * static_cast<double>(k + 1) / static_cast<double>(n_anchor);
  }
  TransportState far0 = s0;
  far0.U = Mat();
  const TransportResult path = transport(model, far0, anchor_times, fo);
  if (!path.complete()) {
    out.status = path.status;
    return out;
  }
  const double delta = std::min(o.fd_step, 0.5 * std::abs(anchor_times.front()));

  // Sweeps U from the far anchor to the first one, then samples around 0.
  auto sweep = [&](const Mat& U0, TransportResult& last) {
    TransportState cur = path.states.back();
    cur.U = U0;
    for (std::size_t k = n_anchor - 1; k > 0; --k) {
      const TransportResult seg = transport(model, cur, {path.states[k - 1].t}, fo);
      if (!seg.complete()) return seg.status;
      const Mat U = seg.states.back().U;
      cur = path.states[k - 1];
      cur.U = U;
    }
    last = transport(model, cur, {-sign * delta, 0.0, sign * delta}, fo);
    return last.status;
  };

  TransportResult run, probe;
  OdeStatus st = sweep(Mat::Zero(m, m), run);
  if (st == OdeStatus::Ok) st = sweep(sign * o.probe * Mat::Identity(m, m), probe);
  if (st != OdeStatus::Ok) {
    out.status = st;
    return out;
  }
  const TransportState& minus = sign > 0 ? run.states[0] : run.states[2];
  const TransportState& zero = run.states[1];
  const TransportState& plus = sign > 0 ? run.states[2] : run.states[0];

  const Mat dU = (plus.U - minus.U) / (2.0 * delta);
  const Mat A = frame_curvature(model, zero.p, zero.v, zero.frame);
  out.residual = (dU + zero.U * zero.U + A).norm();
  out.gap = (zero.U - probe.states[1].U).norm();

  // Re-express in the starting frame; the last segment moves the frame only by
  // integration error.
  const Vec g = diagonal_jet(model, s0.p, false).g;
  const Mat O = s0.frame.rightCols(m).transpose() * g.asDiagonal() * zero.frame.rightCols(m);
  out.U = O * zero.U * O.transpose();
  return out;
}

}  // namespace

RiccatiSplitting riccati_splitting(const MetricModel& model, const PhaseState& start, const RiccatiOptions& options) {
  model.check_domain(start.p);
  if (!(options.horizon > 0.0) || !(options.tol > 0.0) || !(options.fd_step > 0.0)) {
    throw std::invalid_argument("riccati_splitting: horizon, tol and fd_step must be positive");
  }
  TransportState s0;
  s0.p = start.p;
  s0.v = start.v;
  s0.frame = orthonormal_frame(model, start.p, start.v);
  const int m = model.dim() - 1;
  s0.J = Mat(m, 0);
  s0.Jp = Mat(m, 0);

  RiccatiSplitting out;
  out.frame = s0.frame;
  const HalfSplitting u = riccati_half(model, s0, +1.0, options);
  const HalfSplitting s = riccati_half(model, s0, -1.0, options);
  out.status = u.status != OdeStatus::Ok ? u.status : s.status;
  if (out.status != OdeStatus::Ok) return out;
  out.U_unstable = u.U;
  out.U_stable = s.U;
  out.residual_unstable = u.residual;
  out.residual_stable = s.residual;
  out.gap_unstable = u.gap;
  out.gap_stable = s.gap;
  out.converged = u.residual < options.residual_tol && s.residual < options.residual_tol &&
                  u.gap < options.gap_tol && s.gap < options.gap_tol;
  return out;
}

RiccatiSplitting riccati_splitting(const MetricModel& model, const GeodesicPath& path, const RiccatiOptions& options) {
  if (path.states.empty()) throw std::invalid_argument("riccati_splitting: empty geodesic path");
  return riccati_splitting(model, path.states.front(), options);
}

std::vector<double> jacobi_norm_ratios(const MetricModel& model, const PhaseState& start, const Vec& j0, const Vec& jp0,
                                       const std::vector<double>& times, const FlowOptions& options) {
  const int m = model.dim() - 1;
  if (j0.size() != m || jp0.size() != m) throw std::invalid_argument("jacobi_norm_ratios: frame data must have d-1 entries");
  const double n0 = j0.norm();
  if (!(n0 > 0.0)) throw std::invalid_argument("jacobi_norm_ratios: J(0) must be nonzero");
  TransportState s0;
  s0.p = start.p;
  s0.v = start.v;
  s0.frame = orthonormal_frame(model, start.p, start.v);
  s0.J = j0;
  s0.Jp = jp0;
  const TransportResult tr = transport(model, s0, times, options);
  throw_on_failure(tr.status, "jacobi_norm_ratios");
  std::vector<double> out;
  out.reserve(times.size());
  for (const auto& s : tr.states) out.push_back(s.J.col(0).norm() / n0);
  return out;
}

}  // namespace pinchlab
