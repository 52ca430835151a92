#include "oracles.hpp"

#include <cmath>
#include <vector>

namespace pinchlab::oracle {

MetricFn uhs_metric(double b, double lambda) {
  return [=](const Vec& x) {
    const double y = x[x.size() - 1];
    const double s = lambda * lambda / (b * b * y * y);
    return Mat(Mat::Identity(x.size(), x.size()) * s);
  };
}

MetricFn fermi_metric(double b, double lambda) {
  return [=](const Vec& x) {
    const Eigen::Index n = x.size() - 1;
    const double y = x[n - 1];
    const double c = std::cosh(b * x[n]);
    Mat g = Mat::Zero(n + 1, n + 1);
    for (Eigen::Index i = 0; i < n; ++i) g(i, i) = c * c / (b * b * y * y);
    g(n, n) = 1.0;
    return Mat(g * lambda * lambda);
  };
}

MetricFn cone_metric(int fiber_dim, std::function<double(double)> sigma, double lambda) {
  return [=](const Vec& x) {
    const Eigen::Index d = 2 + fiber_dim;
    Mat g = Mat::Zero(d, d);
    g(0, 0) = 1.0;
    const double s = sigma(x[0]);
    g(1, 1) = s * s;
    // g_fiber = dx_m^2 + cosh^2 x_m (dx_{m-1}^2 + cosh^2 x_{m-1} (...))
    double w = std::cosh(x[0]) * std::cosh(x[0]);
    for (Eigen::Index i = d - 1; i >= 2; --i) {
      g(i, i) = w;
      w *= std::cosh(x[i]) * std::cosh(x[i]);
    }
    return Mat(g * lambda * lambda);
  };
}

namespace {

// G[a](b, c) = Gamma^a_bc
std::vector<Mat> fd_christoffel(const MetricFn& g, const Vec& x, double h) {
  const Eigen::Index n = x.size();
  std::vector<Mat> dg(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    dg[k] = (g(xp) - g(xm)) / (2.0 * h);
  }
  const Mat ginv = g(x).inverse();
  std::vector<Mat> G(n, Mat::Zero(n, n));
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index c = 0; c < n; ++c) {
        double s = 0.0;
        for (Eigen::Index d = 0; d < n; ++d) s += ginv(a, d) * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
        G[a](b, c) = 0.5 * s;
      }
  return G;
}

}  // namespace

double fd_sectional(const MetricFn& g, const Vec& x, const Vec& u, const Vec& v, double h_outer, double h_inner) {
  const Eigen::Index n = x.size();
  const auto G = fd_christoffel(g, x, h_inner);
  std::vector<std::vector<Mat>> dG(n);  // dG[c][a](b, d) = d_c Gamma^a_bd
  for (Eigen::Index c = 0; c < n; ++c) {
    Vec xp = x, xm = x;
    xp[c] += h_outer;
    xm[c] -= h_outer;
    const auto Gp = fd_christoffel(g, xp, h_inner);
    const auto Gm = fd_christoffel(g, xm, h_inner);
    dG[c].resize(n);
    for (Eigen::Index a = 0; a < n; ++a) dG[c][a] = (Gp[a] - Gm[a]) / (2.0 * h_outer);
  }
  // R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
  const Mat gx = g(x);
  double num = 0.0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index d = 0; d < n; ++d) {
          double R = dG[c][a](d, b) - dG[d][a](c, b);
          for (Eigen::Index e = 0; e < n; ++e) R += G[a](c, e) * G[e](d, b) - G[a](d, e) * G[e](c, b);
          // <R(u, v) v, u> = g_fa R^a_bcd u^f v^b u^c v^d
          double lowered = 0.0;
          for (Eigen::Index f = 0; f < n; ++f) lowered += gx(f, a) * u[f];
          num += lowered * R * v[b] * u[c] * v[d];
        }
  const double uu = u.dot(gx * u), vv = v.dot(gx * v), uv = u.dot(gx * v);
  return num / (uu * vv - uv * uv);
}

Vec uhs_to_hyperboloid(const Vec& p) {
  const Eigen::Index n = p.size();
  const double y = p[n - 1];
  const double x2 = p.head(n - 1).squaredNorm();
  Vec X(n + 1);
  X[0] = (1.0 + x2 + y * y) / (2.0 * y);
  for (Eigen::Index i = 0; i < n - 1; ++i) X[i + 1] = p[i] / y;
  X[n] = (1.0 - x2 - y * y) / (2.0 * y);
  return X;
}

double hyperboloid_distance(const Vec& X, const Vec& Y) {
  const double minkowski = -X[0] * Y[0] + X.tail(X.size() - 1).dot(Y.tail(Y.size() - 1));
  return std::acosh(std::max(1.0, -minkowski));
}

double uhs_distance(const Vec& p, const Vec& pp, double b) {
  return hyperboloid_distance(uhs_to_hyperboloid(p), uhs_to_hyperboloid(pp)) / b;
}

Vec fermi_to_hyperboloid(const Vec& q, double t) {
  const Vec Q = uhs_to_hyperboloid(q);
  Vec X(Q.size() + 1);
  X.head(Q.size()) = std::cosh(t) * Q;
  X[Q.size()] = std::sinh(t);
  return X;
}

double fermi_distance(const Vec& q, double t, const Vec& qp, double tp, double b) {
  return hyperboloid_distance(fermi_to_hyperboloid(q, b * t), fermi_to_hyperboloid(qp, b * tp)) / b;
}

Vec constant_curvature_jacobi(double b, const Vec& j0, const Vec& jp0, double t) {
  return j0 * std::cosh(b * t) + jp0 * (std::sinh(b * t) / b);
}

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const long double n = static_cast<long double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double s = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {static_cast<double>(s), static_cast<double>((sy - s * sx) / n)};
}

double fd_second(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

}  // namespace pinchlab::oracle
