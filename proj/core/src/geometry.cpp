#include "pinchlab/geometry.hpp"

#include "pinchlab/parallel.hpp"
#include "pinchlab/random.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pinchlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int chart_dim(const MetricModel::Chart& chart) {
  return std::visit(
      [](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, UpperHalfSpace>) {
          return c.dim;
        } else if constexpr (std::is_same_v<T, WarpedSlice>) {
          return c.base.dim + 1;
        } else {
          return c.fiber_dim + 2;
        }
      },
      chart);
}

void validate_uhs(const UpperHalfSpace& u, int min_dim) {
  if (u.dim < min_dim) throw std::invalid_argument("UpperHalfSpace: dimension too small");
  if (!(u.b > 0.0) || !std::isfinite(u.b)) throw std::invalid_argument("UpperHalfSpace: b must be positive");
}

// Metric jet of the upper half-space factor 1/(b^2 y^2) as a function of y.
struct HalfSpaceFactor {
  double h, dh, d2h;
};

HalfSpaceFactor half_space_factor(double y, double b) {
  const double inv = 1.0 / (b * b);
  return {inv / (y * y), -2.0 * inv / (y * y * y), 6.0 * inv / (y * y * y * y)};
}

DiagonalJet jet_uhs(const UpperHalfSpace& u, const Vec& x, bool with_second) {
  const int n = u.dim;
  const int iy = n - 1;
  const auto f = half_space_factor(x[iy], u.b);
  DiagonalJet jet;
  jet.g = Vec::Constant(n, f.h);
  jet.dg = Mat::Zero(n, n);
  jet.dg.col(iy).setConstant(f.dh);
  if (with_second) {
    jet.d2g.assign(n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i) jet.d2g[i](iy, iy) = f.d2h;
  }
  return jet;
}

DiagonalJet jet_warped(const WarpedSlice& w, const Vec& x, bool with_second) {
  const int n = w.base.dim;
  const int d = n + 1;
  const int iy = n - 1;
  const int it = n;
  const auto f = half_space_factor(x[iy], w.base.b);
  const Jet1D wt = w.warp(x[it]);
  const double W = wt.value * wt.value;
  const double dW = 2.0 * wt.value * wt.d1;
  const double d2W = 2.0 * (wt.d1 * wt.d1 + wt.value * wt.d2);

  DiagonalJet jet;
  jet.g = Vec::Constant(d, W * f.h);
  jet.g[it] = 1.0;
  jet.dg = Mat::Zero(d, d);
  for (int a = 0; a < n; ++a) {
    jet.dg(a, iy) = W * f.dh;
    jet.dg(a, it) = dW * f.h;
  }
  if (with_second) {
    jet.d2g.assign(d, Mat::Zero(d, d));
    for (int a = 0; a < n; ++a) {
      auto& h = jet.d2g[a];
      h(iy, iy) = W * f.d2h;
      h(it, it) = d2W * f.h;
      h(iy, it) = h(it, iy) = dW * f.dh;
    }
  }
  return jet;
}

DiagonalJet jet_cone(const ConeChart& c, const Vec& x, bool with_second) {
  const int m = c.fiber_dim;
  const int d = m + 2;
  const double r = x[0];
  const Jet1D s = c.sigma(r);
  const double C = std::cosh(r) * std::cosh(r);
  const double dC = std::sinh(2.0 * r);
  const double d2C = 2.0 * std::cosh(2.0 * r);

  DiagonalJet jet;
  jet.g = Vec::Zero(d);
  jet.dg = Mat::Zero(d, d);
  if (with_second) jet.d2g.assign(d, Mat::Zero(d, d));

  jet.g[0] = 1.0;
  jet.g[1] = s.value * s.value;
  jet.dg(1, 0) = 2.0 * s.value * s.d1;
  if (with_second) jet.d2g[1](0, 0) = 2.0 * (s.d1 * s.d1 + s.value * s.d2);

  // Fiber coordinate x_i sits at chart index 2 + i; its factor is
  // P_i = prod_{j > i} cosh(x_j)^2.
  std::vector<double> tanh_x(m), ratio2(m);
  for (int j = 0; j < m; ++j) {
    const double xj = x[2 + j];
    tanh_x[j] = std::tanh(xj);
    ratio2[j] = 2.0 * std::cosh(2.0 * xj) / (std::cosh(xj) * std::cosh(xj));
  }
  for (int i = 0; i < m; ++i) {
    const int ii = 2 + i;
    double P = 1.0;
    for (int j = i + 1; j < m; ++j) P *= std::cosh(x[2 + j]) * std::cosh(x[2 + j]);
    jet.g[ii] = C * P;
    jet.dg(ii, 0) = dC * P;
    for (int j = i + 1; j < m; ++j) jet.dg(ii, 2 + j) = C * P * 2.0 * tanh_x[j];
    if (with_second) {
      auto& h = jet.d2g[ii];
      h(0, 0) = d2C * P;
      for (int j = i + 1; j < m; ++j) {
        h(0, 2 + j) = h(2 + j, 0) = dC * P * 2.0 * tanh_x[j];
        for (int k = i + 1; k < m; ++k) {
          h(2 + j, 2 + k) = (j == k) ? C * P * ratio2[j] : C * P * 4.0 * tanh_x[j] * tanh_x[k];
        }
      }
    }
  }
  return jet;
}

}  // namespace

MetricModel::MetricModel(Chart chart, double lambda) : chart_(std::move(chart)), lambda_(lambda) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw std::invalid_argument("metric scale must be positive");
  dim_ = chart_dim(chart_);
}

MetricModel MetricModel::upper_half_space(int dim, double b) {
  UpperHalfSpace u{dim, b};
  validate_uhs(u, 2);
  return MetricModel(u, 1.0);
}

MetricModel MetricModel::warped_slice(UpperHalfSpace base, SmoothFunction1D warp) {
  validate_uhs(base, 1);
  return MetricModel(WarpedSlice{base, std::move(warp)}, 1.0);
}

MetricModel MetricModel::hyperbolic_fermi(int base_dim, double b) {
  return warped_slice(UpperHalfSpace{base_dim, b}, SmoothFunction1D::cosh(b));
}

MetricModel MetricModel::cone_chart(int fiber_dim, SmoothFunction1D sigma, double r_max, double r_eps) {
  if (fiber_dim < 0) throw std::invalid_argument("ConeChart: negative fiber dimension");
  if (!(r_eps > 0.0) || !(r_max > r_eps)) throw std::invalid_argument("ConeChart: need 0 < r_eps < r_max");
  if (!sigma.in_domain(r_eps) || !sigma.in_domain(r_max)) {
    throw std::invalid_argument("ConeChart: sigma domain does not cover [r_eps, r_max]");
  }
  return MetricModel(ConeChart{fiber_dim, std::move(sigma), r_max, r_eps}, 1.0);
}

MetricModel MetricModel::rescaled(double lambda) const { return MetricModel(chart_, lambda_ * lambda); }

bool MetricModel::contains(const Point& p) const {
  if (p.dim() != dim_) return false;
  if (!p.coords.allFinite()) return false;
  return std::visit(
      [&](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, UpperHalfSpace>) {
          return p.coords[c.dim - 1] > 0.0;
        } else if constexpr (std::is_same_v<T, WarpedSlice>) {
          return p.coords[c.base.dim - 1] > 0.0 && c.warp.in_domain(p.coords[c.base.dim]) &&
                 c.warp.value(p.coords[c.base.dim]) > 0.0;
        } else {
          const double r = p.coords[0];
          return r >= c.r_eps && r <= c.r_max;
        }
      },
      chart_);
}

void MetricModel::check_domain(const Point& p) const {
  if (p.dim() != dim_) {
    std::ostringstream msg;
    msg << describe() << ": point has " << p.dim() << " coordinates, chart dimension is " << dim_;
    throw DomainError(msg.str());
  }
  if (!contains(p)) {
    std::ostringstream msg;
    msg << describe() << ": point (" << p.coords.transpose() << ") outside the chart domain";
    throw DomainError(msg.str());
  }
}

std::string MetricModel::describe() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, UpperHalfSpace>) {
          out << "UpperHalfSpace(dim=" << c.dim << ", b=" << c.b << ")";
        } else if constexpr (std::is_same_v<T, WarpedSlice>) {
          out << "WarpedSlice(base=UpperHalfSpace(dim=" << c.base.dim << ", b=" << c.base.b
              << "), warp=" << c.warp.name() << ")";
        } else {
          out << "ConeChart(fiber_dim=" << c.fiber_dim << ", sigma=" << c.sigma.name() << ", r in [" << c.r_eps
              << ", " << c.r_max << "])";
        }
      },
      chart_);
  if (lambda_ != 1.0) out << " scaled by " << lambda_ << "^2";
  return out.str();
}

DiagonalJet diagonal_jet(const MetricModel& model, const Point& p, bool with_second) {
  model.check_domain(p);
  DiagonalJet jet = std::visit(
      [&](const auto& c) -> DiagonalJet {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, UpperHalfSpace>) {
          return jet_uhs(c, p.coords, with_second);
        } else if constexpr (std::is_same_v<T, WarpedSlice>) {
          return jet_warped(c, p.coords, with_second);
        } else {
          return jet_cone(c, p.coords, with_second);
        }
      },
      model.chart());
  const double s2 = model.scale() * model.scale();
  if (s2 != 1.0) {
    jet.g *= s2;
    jet.dg *= s2;
    for (auto& h : jet.d2g) h *= s2;
  }
  return jet;
}

Mat metric_at(const MetricModel& model, const Point& p) {
  return diagonal_jet(model, p, false).g.asDiagonal();
}

MetricJet metric_jet(const MetricModel& model, const Point& p) {
  const DiagonalJet dj = diagonal_jet(model, p, true);
  const int n = model.dim();
  MetricJet jet;
  jet.g = dj.g.asDiagonal();
  jet.dg.assign(n, Mat::Zero(n, n));
  jet.d2g.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      jet.dg[k](i, i) = dj.dg(i, k);
      for (int l = 0; l < n; ++l) jet.d2g[k][l](i, i) = dj.d2g[i](k, l);
    }
  }
  return jet;
}

double inner(const MetricModel& model, const Point& p, const Vec& u, const Vec& v) {
  const Vec g = diagonal_jet(model, p, false).g;
  return (g.array() * u.array() * v.array()).sum();
}

double norm(const MetricModel& model, const Point& p, const Vec& u) { return std::sqrt(inner(model, p, u, u)); }

Array3 christoffel_at(const MetricModel& model, const Point& p) {
  const DiagonalJet jet = diagonal_jet(model, p, false);
  const int n = model.dim();
  Array3 gamma(n);
  for (int k = 0; k < n; ++k) {
    const double half_inv = 0.5 / jet.g[k];
    for (int j = 0; j < n; ++j) {
      const double v = half_inv * jet.dg(k, j);
      if (j == k) {
        gamma(k, k, k) = v;
      } else {
        gamma(k, k, j) = v;
        gamma(k, j, k) = v;
        gamma(k, j, j) = -half_inv * jet.dg(j, k);
      }
    }
  }
  return gamma;
}

Array3 christoffel_from_jet(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  const Mat ginv = jet.g.inverse();
  Array3 gamma(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int e = 0; e < n; ++e) {
          s += ginv(a, e) * (jet.dg[b](e, c) + jet.dg[c](e, b) - jet.dg[e](b, c));
        }
        gamma(a, b, c) = 0.5 * s;
      }
    }
  }
  return gamma;
}

Array3 christoffel_fd(const MetricField& metric, const Vec& p, double h) {
  const int n = static_cast<int>(p.size());
  MetricJet jet;
  jet.g = metric(p);
  jet.dg.resize(n);
  for (int k = 0; k < n; ++k) {
    Vec plus = p, minus = p;
    plus[k] += h;
    minus[k] -= h;
    jet.dg[k] = (metric(plus) - metric(minus)) / (2.0 * h);
  }
  return christoffel_from_jet(jet);
}

Array4 riemann_from_jet(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  const Mat ginv = jet.g.inverse();
  const Array3 gamma = christoffel_from_jet(jet);

  // dgamma(f, a, b, c) = d_f Gamma^a_{bc}
  Array4 dgamma(n);
  for (int f = 0; f < n; ++f) {
    const Mat dginv = -ginv * jet.dg[f] * ginv;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          double s = 0.0;
          for (int e = 0; e < n; ++e) {
            const double S = jet.dg[b](e, c) + jet.dg[c](e, b) - jet.dg[e](b, c);
            const double dS = jet.d2g[f][b](e, c) + jet.d2g[f][c](e, b) - jet.d2g[f][e](b, c);
            s += dginv(a, e) * S + ginv(a, e) * dS;
          }
          dgamma(f, a, b, c) = 0.5 * s;
        }
      }
    }
  }

  // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
  Array4 up(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          double s = dgamma(c, a, d, b) - dgamma(d, a, c, b);
          for (int e = 0; e < n; ++e) s += gamma(a, c, e) * gamma(e, d, b) - gamma(a, d, e) * gamma(e, c, b);
          up(a, b, c, d) = s;
        }
      }
    }
  }

  Array4 low(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int e = 0; e < n; ++e) s += jet.g(a, e) * up(e, b, c, d);
          low(a, b, c, d) = s;
        }
      }
    }
  }
  return low;
}

Array4 riemann_tensor(const MetricModel& model, const Point& p) { return riemann_from_jet(metric_jet(model, p)); }

Vec orthonormal_scales(const MetricModel& model, const Point& p) {
  return diagonal_jet(model, p, false).g.array().sqrt();
}

Mat coordinate_plane_curvatures(const MetricModel& model, const Point& p) {
  model.check_domain(p);
  const int n = model.dim();
  Mat K = Mat::Zero(n, n);
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, UpperHalfSpace>) {
          K.setConstant(-c.b * c.b);
        } else if constexpr (std::is_same_v<T, WarpedSlice>) {
          const int it = c.base.dim;
          const Jet1D w = c.warp(p.coords[it]);
          K.setConstant((-c.base.b * c.base.b - w.d1 * w.d1) / (w.value * w.value));
          const double radial = -w.d2 / w.value;
          K.row(it).setConstant(radial);
          K.col(it).setConstant(radial);
        } else {
          const double r = p.coords[0];
          const Jet1D s = c.sigma(r);
          const double sh = std::sinh(r);
          const double ch = std::cosh(r);
          K.setConstant((-1.0 - sh * sh) / (ch * ch));
          K.row(0).setConstant(-1.0);
          K.col(0).setConstant(-1.0);
          const double theta_x = -(s.d1 * sh) / (s.value * ch);
          K.row(1).setConstant(theta_x);
          K.col(1).setConstant(theta_x);
          K(0, 1) = K(1, 0) = -s.d2 / s.value;
        }
      },
      model.chart());
  K.diagonal().setZero();
  const double s2 = model.scale() * model.scale();
  if (s2 != 1.0) K /= s2;
  return K;
}

namespace {

// Sum_{i<j} K_ij (x^v)_ij (y^v)_ij in orthonormal components.
double curvature_form_hat(const Mat& K, const Vec& xh, const Vec& vh, const Vec& yh) {
  const int n = static_cast<int>(K.rows());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      s += K(i, j) * (xh[i] * vh[j] - xh[j] * vh[i]) * (yh[i] * vh[j] - yh[j] * vh[i]);
    }
  }
  return s;
}

}  // namespace

double curvature_form(const MetricModel& model, const Point& p, const Vec& x, const Vec& v, const Vec& y) {
  const Mat K = coordinate_plane_curvatures(model, p);
  const Vec s = orthonormal_scales(model, p);
  return curvature_form_hat(K, s.cwiseProduct(x), s.cwiseProduct(v), s.cwiseProduct(y));
}

Mat jacobi_operator(const MetricModel& model, const Point& p, const Vec& v, const Mat& frame) {
  const Mat K = coordinate_plane_curvatures(model, p);
  const Vec s = orthonormal_scales(model, p);
  const int n = model.dim();
  const int m = static_cast<int>(frame.cols());
  const Vec vh = s.cwiseProduct(v);
  // Bivector coordinates of F_a ^ v on the pairs i < j, weighted by sqrt|K| sign.
  const int pairs = n * (n - 1) / 2;
  Mat W(pairs, m);
  Vec weight(pairs);
  for (int a = 0; a < m; ++a) {
    const Vec fh = s.cwiseProduct(frame.col(a));
    int k = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j, ++k) {
        W(k, a) = fh[i] * vh[j] - fh[j] * vh[i];
        weight[k] = K(i, j);
      }
    }
  }
  return W.transpose() * weight.asDiagonal() * W;
}

double sectional_curvature(const MetricModel& model, const TangentPlane& plane, CurvatureRoute route) {
  const Point& p = plane.base;
  model.check_domain(p);
  if (plane.u.size() != model.dim() || plane.v.size() != model.dim()) {
    throw std::invalid_argument("sectional_curvature: vector dimension mismatch");
  }
  const double uu = inner(model, p, plane.u, plane.u);
  const double vv = inner(model, p, plane.v, plane.v);
  const double uv = inner(model, p, plane.u, plane.v);
  const double gram = uu * vv - uv * uv;
  if (!(uu > 0.0 && vv > 0.0) || !(gram > 1e-12 * uu * vv)) {
    throw std::invalid_argument("sectional_curvature: degenerate plane");
  }
  double num = 0.0;
  if (route == CurvatureRoute::ClosedForm) {
    num = curvature_form(model, p, plane.u, plane.v, plane.u);
  } else {
    const Array4 R = riemann_tensor(model, p);
    const int n = model.dim();
    const Vec& u = plane.u;
    const Vec& v = plane.v;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          for (int d = 0; d < n; ++d) num += R(a, b, c, d) * u[a] * v[b] * u[c] * v[d];
        }
      }
    }
  }
  return num / gram;
}

std::vector<Point> grid_points(const std::vector<AxisRange>& grid) {
  if (grid.empty()) throw std::invalid_argument("curvature grid: no axes");
  std::size_t total = 1;
  for (const auto& a : grid) {
    if (a.count == 0) throw std::invalid_argument("curvature grid: empty axis");
    total *= a.count;
  }
  const int d = static_cast<int>(grid.size());
  std::vector<Point> pts;
  pts.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vec x(d);
    for (int k = 0; k < d; ++k) {
      const auto& a = grid[k];
      x[k] = a.count == 1 ? a.lo : a.lo + (a.hi - a.lo) * static_cast<double>(idx[k]) / static_cast<double>(a.count - 1);
    }
    pts.emplace_back(std::move(x));
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < grid[k].count) break;
      idx[k] = 0;
    }
  }
  return pts;
}

namespace {

struct PointScan {
  CurvatureExtremum min, max;
  Mat plane_values;
  std::size_t n_planes = 0;
};

}  // namespace

CurvatureScan curvature_range_scan(const MetricModel& model, const std::vector<AxisRange>& grid,
                                   const ScanOptions& options) {
  if (static_cast<int>(grid.size()) != model.dim()) {
    throw std::invalid_argument("curvature_range_scan: grid dimension does not match the chart");
  }
  const std::vector<Point> pts = grid_points(grid);
  for (const auto& p : pts) {
    if (!model.contains(p)) throw std::invalid_argument("curvature_range_scan: grid leaves the chart domain");
  }
  const int n = model.dim();
  if (n < 2) throw std::invalid_argument("curvature_range_scan: need dimension >= 2");

  std::vector<PointScan> results(pts.size());
  parallel_for(pts.size(), options.workers, [&](std::size_t idx) {
    const Point& p = pts[idx];
    PointScan out;
    out.min.kappa = std::numeric_limits<double>::infinity();
    out.max.kappa = -std::numeric_limits<double>::infinity();
    out.plane_values = Mat::Constant(n, n, kNaN);
    auto consider = [&](const Vec& u, const Vec& v, double k) {
      ++out.n_planes;
      if (k < out.min.kappa) out.min = {k, TangentPlane{p, u, v}};
      if (k > out.max.kappa) out.max = {k, TangentPlane{p, u, v}};
    };
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Vec u = Vec::Unit(n, i);
        const Vec v = Vec::Unit(n, j);
        const double k = sectional_curvature(model, TangentPlane{p, u, v}, options.route);
        out.plane_values(i, j) = k;
        consider(u, v, k);
      }
    }
    SplitMix64 rng(derive_seed(options.seed, idx));
    const Vec s = orthonormal_scales(model, p);
    for (std::size_t r = 0; r < options.random_planes; ++r) {
      for (;;) {
        Vec uh(n), vh(n);
        for (int i = 0; i < n; ++i) uh[i] = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < n; ++i) vh[i] = rng.uniform(-1.0, 1.0);
        const double uu = uh.squaredNorm(), vv = vh.squaredNorm(), uv = uh.dot(vh);
        if (!(uu * vv - uv * uv > 1e-6 * uu * vv)) continue;
        const Vec u = uh.cwiseQuotient(s);
        const Vec v = vh.cwiseQuotient(s);
        consider(u, v, sectional_curvature(model, TangentPlane{p, u, v}, options.route));
        break;
      }
    }
    results[idx] = std::move(out);
  });

  CurvatureScan scan;
  scan.min.kappa = std::numeric_limits<double>::infinity();
  scan.max.kappa = -std::numeric_limits<double>::infinity();
  scan.plane_min = Mat::Constant(n, n, kNaN);
  scan.plane_max = Mat::Constant(n, n, kNaN);
  scan.n_points = pts.size();
  for (const auto& r : results) {
    scan.n_planes += r.n_planes;
    if (r.min.kappa < scan.min.kappa) scan.min = r.min;
    if (r.max.kappa > scan.max.kappa) scan.max = r.max;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double k = r.plane_values(i, j);
        if (std::isnan(scan.plane_min(i, j)) || k < scan.plane_min(i, j)) scan.plane_min(i, j) = k;
        if (std::isnan(scan.plane_max(i, j)) || k > scan.plane_max(i, j)) scan.plane_max(i, j) = k;
      }
    }
  }
  return scan;
}

}  // namespace pinchlab
