#pragma once

#include "pinchlab/types.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace pinchlab {

// Right-hand side y' = f(t, y). Returns false when y lies outside the region
// where f is defined; the integrator then retries with a smaller step.
using OdeRhs = std::function<bool(double t, const Vec& y, Vec& dydt)>;

enum class OdeStatus {
  Ok,             // reached the final time
  DomainExit,     // the solution left the domain of the right-hand side
  StepUnderflow,  // the step size fell below h_min for accuracy reasons
  MaxSteps,       // step budget exhausted
};

const char* to_string(OdeStatus status);

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double h_init = 0.0;  // 0 picks a starting step automatically
  double h_max = 0.0;   // 0 means unbounded
  double h_min = 1e-13;
  std::size_t max_steps = 1000000;
};

struct OdeSolution {
  OdeStatus status = OdeStatus::Ok;
  // Requested sample times that were reached, with the interpolated states.
  std::vector<double> times;
  std::vector<Vec> states;
  // Last accepted time and state (the exit point when status != Ok).
  double t_last = 0.0;
  Vec y_last;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

// Dormand-Prince 5(4) with FSAL and fifth-order-consistent dense output.
// Integrates from t0 to t1 (either direction). `samples` must be monotone in
// the direction of integration and lie in [t0, t1]; when empty, only t1 is
// sampled.
OdeSolution integrate_dopri5(const OdeRhs& f, double t0, const Vec& y0, double t1,
                             const std::vector<double>& samples = {}, const OdeOptions& options = {});

}  // namespace pinchlab
