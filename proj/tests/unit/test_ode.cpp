#include "pinchlab/ode.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pinchlab;

TEST(Ode, ExponentialDecay) {
  const OdeRhs f = [](double, const Vec& y, Vec& dy) {
    dy = -y;
    return true;
  };
  OdeOptions o;
  o.rtol = o.atol = 1e-11;
  const auto sol = integrate_dopri5(f, 0.0, Vec::Ones(1), 5.0, {}, o);
  ASSERT_EQ(sol.status, OdeStatus::Ok);
  ASSERT_EQ(sol.states.size(), 1u);
  EXPECT_NEAR(sol.states[0][0], std::exp(-5.0), 1e-11);
}

TEST(Ode, DenseOutputOnHarmonicOscillator) {
  const OdeRhs f = [](double, const Vec& y, Vec& dy) {
    dy.resize(2);
    dy[0] = y[1];
    dy[1] = -y[0];
    return true;
  };
  std::vector<double> samples;
  for (int i = 0; i <= 100; ++i) samples.push_back(0.1 * i);
  OdeOptions o;
  o.rtol = o.atol = 1e-12;
  const auto sol = integrate_dopri5(f, 0.0, Vec::Unit(2, 0), 10.0, samples, o);
  ASSERT_EQ(sol.status, OdeStatus::Ok);
  ASSERT_EQ(sol.times.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_NEAR(sol.states[i][0], std::cos(samples[i]), 1e-9);
    EXPECT_NEAR(sol.states[i][1], -std::sin(samples[i]), 1e-9);
  }
}

TEST(Ode, BackwardIntegration) {
  const OdeRhs f = [](double t, const Vec&, Vec& dy) {
    dy = Vec::Constant(1, 2.0 * t);
    return true;
  };
  const auto sol = integrate_dopri5(f, 1.0, Vec::Ones(1), -2.0, {0.0, -1.0, -2.0});
  ASSERT_EQ(sol.status, OdeStatus::Ok);
  EXPECT_NEAR(sol.states[0][0], 0.0, 1e-12);
  EXPECT_NEAR(sol.states[1][0], 1.0, 1e-12);
  EXPECT_NEAR(sol.states[2][0], 4.0, 1e-12);
}

TEST(Ode, DomainExitStopsNearBoundary) {
  // y' = 1 on y < 1
  const OdeRhs f = [](double, const Vec& y, Vec& dy) {
    if (y[0] >= 1.0) return false;
    dy = Vec::Ones(1);
    return true;
  };
  const auto sol = integrate_dopri5(f, 0.0, Vec::Zero(1), 3.0, {0.5, 2.0});
  EXPECT_EQ(sol.status, OdeStatus::DomainExit);
  ASSERT_EQ(sol.times.size(), 1u);
  EXPECT_NEAR(sol.states[0][0], 0.5, 1e-12);
  EXPECT_LT(sol.y_last[0], 1.0);
  EXPECT_GT(sol.y_last[0], 0.99);
}

TEST(Ode, StepBudget) {
  const OdeRhs f = [](double, const Vec& y, Vec& dy) {
    dy.resize(2);
    dy[0] = y[1];
    dy[1] = -400.0 * y[0];
    return true;
  };
  OdeOptions o;
  o.max_steps = 10;
  const auto sol = integrate_dopri5(f, 0.0, Vec::Unit(2, 0), 100.0, {}, o);
  EXPECT_EQ(sol.status, OdeStatus::MaxSteps);
  EXPECT_EQ(sol.accepted + sol.rejected, 10u);
}

TEST(Ode, RejectsSamplesOutsideInterval) {
  const OdeRhs f = [](double, const Vec& y, Vec& dy) {
    dy = y;
    return true;
  };
  EXPECT_THROW(integrate_dopri5(f, 0.0, Vec::Ones(1), 1.0, {0.5, 0.2}), std::invalid_argument);
  EXPECT_THROW(integrate_dopri5(f, 0.0, Vec::Ones(1), 1.0, {2.0}), std::invalid_argument);
}

TEST(Ode, StatusNames) {
  EXPECT_STREQ(to_string(OdeStatus::Ok), "ok");
  EXPECT_STREQ(to_string(OdeStatus::DomainExit), "domain_exit");
}
