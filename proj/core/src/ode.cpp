#include "pinchlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinchlab {

const char* to_string(OdeStatus status) {
  switch (status) {
    case OdeStatus::Ok:
      return "ok";
    case OdeStatus::DomainExit:
      return "domain_exit";
    case OdeStatus::StepUnderflow:
      return "step_underflow";
    case OdeStatus::MaxSteps:
      return "max_steps";
  }
  return "unknown";
}

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double scaled_rms(const Vec& e, const Vec& y0, const Vec& y1, const OdeOptions& o) {
  const Eigen::Index n = e.size();
  if (n == 0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = e[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(n));
}

}  // namespace

OdeSolution integrate_dopri5(const OdeRhs& f, double t0, const Vec& y0, double t1, const std::vector<double>& samples,
                             const OdeOptions& o) {
  if (!(o.rtol > 0.0) || !(o.atol > 0.0)) throw std::invalid_argument("integrate_dopri5: tolerances must be positive");
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  std::vector<double> want = samples.empty() ? std::vector<double>{t1} : samples;
  for (std::size_t i = 0; i < want.size(); ++i) {
    if ((want[i] - t0) * dir < 0.0 || (t1 - want[i]) * dir < 0.0) {
      throw std::invalid_argument("integrate_dopri5: sample time outside the integration interval");
    }
    if (i > 0 && (want[i] - want[i - 1]) * dir < 0.0) {
      throw std::invalid_argument("integrate_dopri5: sample times must be monotone");
    }
  }

  OdeSolution sol;
  sol.t_last = t0;
  sol.y_last = y0;
  std::size_t next = 0;
  while (next < want.size() && want[next] == t0) {
    sol.times.push_back(t0);
    sol.states.push_back(y0);
    ++next;
  }
  if (t0 == t1) return sol;

  const Eigen::Index n = y0.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);

  ++sol.evaluations;
  if (!f(t0, y0, k1)) {
    sol.status = OdeStatus::DomainExit;
    return sol;
  }

  const double span = std::abs(t1 - t0);
  double h = o.h_init;
  if (h <= 0.0) {
    // Starting step from the size of y and y'.
    const double dy0 = scaled_rms(y0, y0, y0, o);
    const double df0 = scaled_rms(k1, y0, y0, o);
    double h0 = (dy0 < 1e-5 || df0 < 1e-5) ? 1e-6 : 0.01 * dy0 / df0;
    h0 = std::min(h0, span);
    ytmp = y0 + dir * h0 * k1;
    double h1 = h0;
    ++sol.evaluations;
    if (f(t0 + dir * h0, ytmp, k2)) {
      const double d2 = scaled_rms(k2 - k1, y0, y0, o) / h0;
      const double m = std::max(df0, d2);
      h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    }
    h = std::min(100.0 * h0, h1);
  }
  if (o.h_max > 0.0) h = std::min(h, o.h_max);
  h = std::min(h, span);

  double t = t0;
  Vec y = y0;
  bool domain_failure = false;

  while ((t1 - t) * dir > 0.0) {
    if (sol.accepted + sol.rejected >= o.max_steps) {
      sol.status = OdeStatus::MaxSteps;
      return sol;
    }
    if (h < o.h_min * std::max(1.0, std::abs(t))) {
      sol.status = domain_failure ? OdeStatus::DomainExit : OdeStatus::StepUnderflow;
      return sol;
    }
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double hs = dir * h;

    bool ok = true;
    auto stage = [&](double tt, const Vec& yy, Vec& k) {
      if (!ok) return;
      ++sol.evaluations;
      ok = f(tt, yy, k) && k.allFinite();
    };
    ytmp = y + hs * (a21 * k1);
    stage(t + c2 * hs, ytmp, k2);
    if (ok) ytmp = y + hs * (a31 * k1 + a32 * k2);
    stage(t + c3 * hs, ytmp, k3);
    if (ok) ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    stage(t + c4 * hs, ytmp, k4);
    if (ok) ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    stage(t + c5 * hs, ytmp, k5);
    if (ok) ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    stage(t + hs, ytmp, k6);
    if (ok) ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double tnew = last ? t1 : t + hs;
    stage(tnew, ynew, k7);

    if (!ok) {
      domain_failure = true;
      ++sol.rejected;
      h *= 0.5;
      continue;
    }

    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = scaled_rms(err, y, ynew, o);
    if (!std::isfinite(en) || en > 1.0) {
      ++sol.rejected;
      const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
      h *= fac;
      continue;
    }

    // Accepted: emit samples in (t, tnew] by dense output.
    while (next < want.size() && (want[next] - tnew) * dir <= 0.0) {
      const double s = want[next];
      Vec ys;
      if (s == tnew) {
        ys = ynew;
      } else {
        const double th = (s - t) / hs;
        const double th1 = 1.0 - th;
        const Vec ydiff = ynew - y;
        const Vec bspl = hs * k1 - ydiff;
        const Vec r4 = ydiff - hs * k7 - bspl;
        const Vec r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        ys = y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)));
      }
      sol.times.push_back(s);
      sol.states.push_back(std::move(ys));
      ++next;
    }

    ++sol.accepted;
    domain_failure = false;
    t = tnew;
    y = ynew;
    k1 = k7;
    sol.t_last = t;
    sol.y_last = y;

    const double fac = en == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
    h *= fac;
    if (o.h_max > 0.0) h = std::min(h, o.h_max);
  }
  return sol;
}

}  // namespace pinchlab
