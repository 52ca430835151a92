#include "oracles.hpp"

#include "pinchlab/flow.hpp"
#include "pinchlab/gtmetric.hpp"
#include "pinchlab/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace pinchlab;

namespace {

FlowOptions tight() {
  FlowOptions o;
  o.tol = 1e-12;
  return o;
}

MetricModel gt_model(double r_max = 30.0) { return gt_cone_model(SmoothingSpec::with_quarter_r0(2, 6.0), 1, r_max); }

}  // namespace

TEST(Flow, VerticalGeodesicInHalfPlane) {
  const MetricModel m = MetricModel::upper_half_space(2);
  const Point end = exp_map(m, Point{0.0, 1.0}, Vec::Unit(2, 1) * 3.0, tight());
  EXPECT_NEAR(end[0], 0.0, 1e-12);
  EXPECT_NEAR(end[1], std::exp(3.0), 1e-9 * std::exp(3.0));
}

TEST(Flow, ExpMapLengthEqualsDistance) {
  const double b = 1.3;
  const MetricModel m = MetricModel::upper_half_space(3, b);
  SplitMix64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Point p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 2)};
    Vec w(3);
    for (int i = 0; i < 3; ++i) w[i] = rng.uniform(-1, 1);
    w *= rng.uniform(0.1, 3.0) / norm(m, p, w);
    const Point q = exp_map(m, p, w, tight());
    EXPECT_NEAR(oracle::uhs_distance(p.coords, q.coords, b), norm(m, p, w), 1e-8);
  }
}

TEST(Flow, SpeedIsConserved) {
  const MetricModel m = gt_model();
  const PhaseState s{Point{2.0, 0.3, 0.1}, Vec{{0.4, 0.2, -0.7}}};
  std::vector<double> samples;
  for (int i = 1; i <= 20; ++i) samples.push_back(0.25 * i);
  const GeodesicPath path = integrate_geodesic(m, s, 5.0, tight(), samples);
  ASSERT_TRUE(path.complete());
  EXPECT_EQ(path.states.size(), samples.size());
  EXPECT_LT(path.speed_drift, 1e-9 * path.speed0);
}

TEST(Flow, ChartExitIsReported) {
  const MetricModel m = MetricModel::cone_chart(1, SmoothFunction1D::sinh(), 3.0);
  const PhaseState s{Point{2.0, 0.0, 0.0}, Vec::Unit(3, 0)};
  const GeodesicPath path = integrate_geodesic(m, s, 5.0);
  EXPECT_EQ(path.status, OdeStatus::DomainExit);
  EXPECT_LE(path.end().p[0], 3.0);
  EXPECT_GT(path.end().p[0], 2.9);
  EXPECT_THROW(exp_map(m, s.p, Vec::Unit(3, 0) * 5.0), DomainError);
  EXPECT_EQ(exp_map(m, s.p, Vec::Zero(3))[0], 2.0);
}

TEST(Flow, OrthonormalFrame) {
  const MetricModel m = gt_model();
  const Point p{3.0, 0.2, -0.4};
  const Vec v{{0.3, -1.0, 0.6}};
  const Mat F = orthonormal_frame(m, p, v);
  const Mat G = metric_at(m, p);
  EXPECT_LT((F.transpose() * G * F - Mat::Identity(3, 3)).norm(), 1e-12);
  EXPECT_LT((F.col(0) - v / norm(m, p, v)).norm(), 1e-12);
}

TEST(Flow, TransportKeepsFrameOrthonormal) {
  const MetricModel m = gt_model();
  TransportState s;
  s.p = Point{1.5, 0.0, 0.3};
  s.v = Vec{{0.5, 0.4, 0.2}};
  s.frame = orthonormal_frame(m, s.p, s.v);
  s.J = Mat::Identity(2, 2);
  s.Jp = Mat::Zero(2, 2);
  const TransportResult r = transport(m, s, {1.0, 2.0, 4.0}, tight());
  ASSERT_TRUE(r.complete());
  for (const auto& st : r.states) {
    const Mat G = metric_at(m, st.p);
    EXPECT_LT((st.frame.transpose() * G * st.frame - Mat::Identity(3, 3)).norm(), 1e-8);
    EXPECT_LT((st.frame.col(0) - st.v / norm(m, st.p, st.v)).norm(), 1e-8);
  }
}

TEST(Flow, JacobiFieldMatchesConstantCurvatureSolution) {
  const double b = 1.3;
  const MetricModel m = MetricModel::hyperbolic_fermi(2, b);
  const Point p{0.1, 0.8, 0.2};
  const Vec v{{0.3, 0.1, 0.5}};
  const Mat F = orthonormal_frame(m, p, v);
  const Vec a{{0.0, 0.6, -0.8}}, c{{0.0, -0.3, 0.4}};  // frame components, perpendicular to v
  const JacobiState init{{p, F * a}, {p, F * c}};
  const double T = 3.0;
  const JacobiResult r = propagate_jacobi(m, PhaseState{p, v}, init, T, tight());
  ASSERT_EQ(r.status, OdeStatus::Ok);
  // J is a Jacobi field along the geodesic with speed |v|: in arc length the
  // data are (a, c / |v|) and the elapsed length is |v| T.
  const double speed = norm(m, p, v);
  const Vec ref = oracle::constant_curvature_jacobi(b, a.tail(2), c.tail(2) / speed, speed * T);
  EXPECT_NEAR(norm(m, r.end.p, r.state.J.components), ref.norm(), 1e-8 * ref.norm());
  EXPECT_LT(r.orthogonality_defect, 1e-8);
  EXPECT_THROW(propagate_jacobi(m, PhaseState{p, v}, {{p, v}, {p, Vec::Zero(3)}}, 1.0), std::invalid_argument);
}

TEST(Flow, CoshLawOnTotallyGeodesicSlice) {
  for (double b : {1.0, 1.3}) {
    for (double lambda : {1.0, 0.8}) {
      const MetricModel m = MetricModel::hyperbolic_fermi(2, b).rescaled(lambda);
      const Hypersurface sigma = Hypersurface::warped_zero_slice();
      for (double t : {-4.0, -0.5, 0.0, 1.0, 6.0}) {
        const auto d = dphi_operator_norm(m, sigma, Point{0.4, 1.7, 0.0}, t, tight());
        const double ref = std::cosh(b * t / lambda);
        EXPECT_NEAR(d.operator_norm, ref, 1e-8 * ref) << "b=" << b << " lambda=" << lambda << " t=" << t;
      }
    }
  }
}

TEST(Flow, NormalFlowAgreesWithExpMap) {
  const MetricModel m = MetricModel::hyperbolic_fermi(2, 1.3).rescaled(1.4);
  const Hypersurface sigma = Hypersurface::warped_zero_slice();
  const Point q{0.2, 0.9, 0.0};
  for (double t : {-2.0, 0.7}) {
    const Point a = normal_flow(m, sigma, q, t);
    const Point b = exp_map(m, q, t * sigma.normal(m, q), tight());
    EXPECT_LT((a.coords - b.coords).norm(), 1e-9);
  }
  const MetricModel uhs = MetricModel::upper_half_space(3);
  const Point p = normal_flow(uhs, Hypersurface::half_space_vertical(), Point{0.0, 0.1, 2.0}, 1.0, tight());
  EXPECT_NEAR(oracle::uhs_distance(Vec{{0.0, 0.1, 2.0}}, p.coords), 1.0, 1e-9);
}

TEST(Flow, HypersurfaceGeometry) {
  const MetricModel cone = gt_model();
  const Hypersurface s = Hypersurface::cone_reflection_slice();
  EXPECT_NO_THROW(s.check_model(cone));
  EXPECT_THROW(s.check_model(MetricModel::upper_half_space(3)), std::invalid_argument);
  EXPECT_THROW(Hypersurface::warped_zero_slice().check_model(cone), std::invalid_argument);
  EXPECT_THROW(Hypersurface::warped_zero_slice().check_model(
                   MetricModel::warped_slice(UpperHalfSpace{2, 1.0}, SmoothFunction1D::sinh())),
               std::invalid_argument);
  EXPECT_TRUE(s.contains(cone, Point{1.0, 0.0, 0.5}));
  EXPECT_TRUE(s.contains(cone, Point{1.0, std::numbers::pi, 0.5}));
  EXPECT_FALSE(s.contains(cone, Point{1.0, 0.1, 0.5}));

  const Point q{2.5, 0.0, 0.3};
  const Vec n = s.normal(cone, q);
  const Mat T = s.tangent_frame(cone, q);
  const Mat G = metric_at(cone, q);
  EXPECT_NEAR(n.dot(G * n), 1.0, 1e-12);
  EXPECT_LT((T.transpose() * G * n).norm(), 1e-12);
  EXPECT_LT((T.transpose() * G * T - Mat::Identity(2, 2)).norm(), 1e-12);
  EXPECT_EQ(s.normal_coordinate(cone), 1);
}

TEST(Flow, ReflectionSliceIsTotallyGeodesic) {
  const MetricModel m = gt_model();
  SplitMix64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Point q{rng.uniform(0.5, 5.0), 0.0, rng.uniform(-1, 1)};
    const double phi = rng.uniform(0, 2 * std::numbers::pi);
    const Mat T = Hypersurface::cone_reflection_slice().tangent_frame(m, q);
    const Vec v = std::cos(phi) * T.col(0) + std::sin(phi) * T.col(1);
    std::vector<double> samples;
    for (int i = 1; i <= 10; ++i) samples.push_back(0.5 * i);
    const auto path = integrate_geodesic(m, {q, v}, 5.0, tight(), samples);
    ASSERT_TRUE(path.complete());
    for (const auto& s : path.states) EXPECT_LE(std::abs(s.p[1]), 1e-12);
  }
}

TEST(Flow, BatchIsIndexedAndWorkerIndependent) {
  const MetricModel m = gt_model();
  const Hypersurface s = Hypersurface::cone_reflection_slice();
  const std::vector<Point> qs{Point{1.0, 0.0, 0.0}, Point{2.5, 0.0, 0.4}};
  const std::vector<double> ts{-1.0, 0.5, 2.0};
  const auto a = dphi_operator_norm_batch(m, s, qs, ts, tight(), 1);
  const auto b = dphi_operator_norm_batch(m, s, qs, ts, tight(), 3);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const auto& d = a[i * ts.size() + j];
      EXPECT_EQ(d.t, ts[j]);
      EXPECT_TRUE(d.base.coords == qs[i].coords);
      EXPECT_EQ(d.operator_norm, b[i * ts.size() + j].operator_norm);
      EXPECT_EQ(d.operator_norm, dphi_operator_norm(m, s, qs[i], ts[j], tight()).operator_norm);
    }
}

TEST(Flow, BatchRecordsFailures) {
  const MetricModel m = gt_model(4.0);
  const auto r = dphi_operator_norm_batch(m, Hypersurface::cone_reflection_slice(), {Point{3.0, 0.0, 0.0}},
                                          {0.5, 10.0});
  EXPECT_EQ(r[0].status, OdeStatus::Ok);
  EXPECT_TRUE(r[0].error.empty());
  EXPECT_NE(r[1].status, OdeStatus::Ok);
  EXPECT_FALSE(r[1].error.empty());
  EXPECT_THROW(dphi_operator_norm(m, Hypersurface::cone_reflection_slice(), Point{3.0, 0.0, 0.0}, 10.0),
               DomainError);
  EXPECT_THROW(dphi_operator_norm(m, Hypersurface::cone_reflection_slice(), Point{3.0, 0.2, 0.0}, 1.0),
               std::invalid_argument);
}

TEST(Flow, RiccatiSolutionsInConstantCurvature) {
  const double b = 1.3;
  const MetricModel m = MetricModel::hyperbolic_fermi(2, b);
  const PhaseState s{Point{0.1, 1.0, 0.3}, Vec{{0.2, -0.4, 0.5}}};
  const RiccatiSplitting r = riccati_splitting(m, s);
  ASSERT_TRUE(r.converged);
  // U = -+ b |v| I for the geodesic parametrised with speed |v|
  const double speed = norm(m, s.p, s.v);
  EXPECT_LT((r.U_stable + b * speed * Mat::Identity(2, 2)).norm(), 1e-7);
  EXPECT_LT((r.U_unstable - b * speed * Mat::Identity(2, 2)).norm(), 1e-7);
  EXPECT_LT(r.residual_stable, 1e-4);
  EXPECT_LT(r.gap_unstable, 1e-6);
}

TEST(Flow, RiccatiOnSmoothedCone) {
  const MetricModel m = gt_model();
  // dr = 0 at launch keeps the geodesic off the axis (r is convex along geodesics)
  PhaseState s{Point{3.0, 0.0, 0.2}, Vec{{0.0, 0.5, 0.4}}};
  s.v /= norm(m, s.p, s.v);  // the horizon is measured in chart time
  const RiccatiSplitting r = riccati_splitting(m, s);
  ASSERT_TRUE(r.converged) << to_string(r.status);
  // symmetric, with U_stable negative and U_unstable positive definite
  EXPECT_LT((r.U_stable - r.U_stable.transpose()).norm(), 1e-6);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (r.U_stable + r.U_stable.transpose()));
  Eigen::SelfAdjointEigenSolver<Mat> eu(0.5 * (r.U_unstable + r.U_unstable.transpose()));
  EXPECT_LT(es.eigenvalues().maxCoeff(), -0.9);
  EXPECT_GT(eu.eigenvalues().minCoeff(), 0.9);
}

TEST(Flow, StableJacobiRatiosDecay) {
  const double b = 1.3;
  const MetricModel m = MetricModel::hyperbolic_fermi(2, b);
  const PhaseState s{Point{0.0, 1.0, 0.0}, Vec{{1.0, 0.0, 0.0}}};  // not unit speed
  const RiccatiSplitting r = riccati_splitting(m, s);
  const Vec j0{{1.0, 0.0}};
  const double speed = norm(m, s.p, s.v);
  const auto ratios = jacobi_norm_ratios(m, s, j0, r.U_stable * j0, {0.0, 1.0, 2.0, 4.0}, tight());
  EXPECT_NEAR(ratios[0], 1.0, 1e-14);
  for (std::size_t i = 1; i < ratios.size(); ++i) {
    const double t = std::vector<double>{0.0, 1.0, 2.0, 4.0}[i] * speed;
    EXPECT_NEAR(ratios[i], std::exp(-b * t), 1e-6);
  }
}
