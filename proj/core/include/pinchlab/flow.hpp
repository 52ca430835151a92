#pragma once

#include "pinchlab/geometry.hpp"
#include "pinchlab/ode.hpp"

#include <string>
#include <vector>

namespace pinchlab {

struct PhaseState {
  Point p;
  Vec v;  // chart components of the velocity at p
};

struct FlowOptions {
  double tol = 1e-9;  // relative and absolute integration tolerance
  std::size_t max_steps = 1000000;
};

struct GeodesicPath {
  OdeStatus status = OdeStatus::Ok;
  std::vector<double> times;
  std::vector<PhaseState> states;
  double speed0 = 0.0;
  // max |speed(t) - speed0| over the recorded states
  double speed_drift = 0.0;

  bool complete() const { return status == OdeStatus::Ok; }
  const PhaseState& end() const { return states.back(); }
};

// Geodesic from `start` over signed time T. `samples` are output times in
// [0, T] (monotone toward T); when empty the path holds the states at 0 and T.
// A chart exit returns the partial path with status DomainExit.
GeodesicPath integrate_geodesic(const MetricModel& model, const PhaseState& start, double T,
                                const FlowOptions& options = {}, std::vector<double> samples = {});

// exp_p(w). Throws DomainError when the geodesic leaves the chart and
// IntegrationError on any other integration failure.
Point exp_map(const MetricModel& model, const Point& p, const Vec& w, const FlowOptions& options = {});

// Orthonormal frame at p whose first column is v/|v|; the remaining columns
// come from Gram-Schmidt on the coordinate directions.
Mat orthonormal_frame(const MetricModel& model, const Point& p, const Vec& v);

// Geodesic together with a parallel orthonormal frame E (first column the unit
// velocity) and perpendicular Jacobi fields in frame coordinates:
//   J'' = -A J,  A(a, b) = <R(E_b, v) v, E_a>,  a, b >= 1,
// optionally with a Riccati matrix U' = -U^2 - A.
struct TransportState {
  double t = 0.0;
  Point p;
  Vec v;
  Mat frame;  // d x d, columns are chart components
  Mat J;      // (d-1) x k
  Mat Jp;     // (d-1) x k
  Mat U;      // (d-1) x (d-1), empty when no Riccati equation is carried
};

struct TransportResult {
  OdeStatus status = OdeStatus::Ok;
  std::vector<TransportState> states;  // one per reached sample time
  bool complete() const { return status == OdeStatus::Ok; }
};

// Integrates from `initial` to the sample times, which must be monotone away
// from initial.t in one direction.
TransportResult transport(const MetricModel& model, const TransportState& initial, const std::vector<double>& times,
                          const FlowOptions& options = {});

// Curvature matrix A(a, b) for a, b >= 1 of the given frame and velocity.
Mat frame_curvature(const MetricModel& model, const Point& p, const Vec& v, const Mat& frame);

struct JacobiState {
  TangentVector J;
  TangentVector Jprime;
};

struct JacobiResult {
  OdeStatus status = OdeStatus::Ok;
  PhaseState end;
  JacobiState state;  // chart components at the end point
  // max over samples of |<J, v>| / (|J| |v|)
  double orthogonality_defect = 0.0;
};

// Perpendicular Jacobi field along the geodesic from `start` up to time T.
// init.J and init.Jprime must be orthogonal to start.v (std::invalid_argument
// otherwise). Throws on integration failure.
JacobiResult propagate_jacobi(const MetricModel& model, const PhaseState& start, const JacobiState& init, double T,
                              const FlowOptions& options = {});
JacobiResult propagate_jacobi(const MetricModel& model, const GeodesicPath& path, const JacobiState& init,
                              double T, const FlowOptions& options = {});

// Totally geodesic coordinate hypersurfaces with a unit normal field.
class Hypersurface {
 public:
  enum class Kind {
    WarpedZeroSlice,      // t = 0 in a WarpedSlice with warp'(0) = 0, normal d_t
    ConeReflectionSlice,  // theta in {0, pi} in a ConeChart, normal sigma^-1 d_theta
    HalfSpaceVertical,    // x_1 = 0 in an UpperHalfSpace, normal b y d_{x_1}
  };

  static Hypersurface warped_zero_slice() { return Hypersurface(Kind::WarpedZeroSlice); }
  static Hypersurface cone_reflection_slice() { return Hypersurface(Kind::ConeReflectionSlice); }
  static Hypersurface half_space_vertical() { return Hypersurface(Kind::HalfSpaceVertical); }

  Kind kind() const { return kind_; }
  std::string name() const;

  // Throws std::invalid_argument when the model variant does not carry this slice.
  void check_model(const MetricModel& model) const;
  bool contains(const MetricModel& model, const Point& q, double tol = 1e-12) const;
  // Unit normal at q (chart components).
  Vec normal(const MetricModel& model, const Point& q) const;
  // Orthonormal basis of T_q Sigma as columns.
  Mat tangent_frame(const MetricModel& model, const Point& q) const;
  // Index of the chart coordinate transverse to the slice.
  int normal_coordinate(const MetricModel& model) const;

 private:
  explicit Hypersurface(Kind kind) : kind_(kind) {}
  Kind kind_;
};

// Phi_t(q) = exp_q(t nu(q)).
Point normal_flow(const MetricModel& model, const Hypersurface& sigma, const Point& q, double t,
                  const FlowOptions& options = {});

struct FlowDifferential {
  Point base;
  double t = 0.0;
  // Components of dPhi_t(e_i) in the transported orthonormal frame at the
  // end point, for an orthonormal tangent frame e_i of Sigma at base.
  Mat frame_image;
  double operator_norm = 0.0;
  OdeStatus status = OdeStatus::Ok;
  std::string error;  // set by the batch API when a sample fails
};

// Largest singular value of dPhi_t at q. Uses Jacobi fields with J(0) = e_i,
// J'(0) = 0, which is exact because Sigma is totally geodesic.
FlowDifferential dphi_operator_norm(const MetricModel& model, const Hypersurface& sigma, const Point& q, double t,
                                    const FlowOptions& options = {});

// All (q, t) combinations, result index i * ts.size() + j. Failures are
// recorded in the status/error fields instead of thrown. The output does not
// depend on the worker count.
std::vector<FlowDifferential> dphi_operator_norm_batch(const MetricModel& model, const Hypersurface& sigma,
                                                       const std::vector<Point>& qs, const std::vector<double>& ts,
                                                       const FlowOptions& options = {}, unsigned workers = 0);

struct RiccatiOptions {
  double horizon = 20.0;
  double tol = 1e-12;
  double residual_tol = 1e-4;
  double gap_tol = 1e-6;
  double fd_step = 1e-3;
  double probe = 4.0;  // |initial value| of the second run used for the gap
};

// Stable and unstable Riccati solutions at time 0 of the geodesic through
// `start`, in the perpendicular part of orthonormal_frame(start.p, start.v).
struct RiccatiSplitting {
  Mat frame;
  Mat U_stable;
  Mat U_unstable;
  // |U' + U^2 + A| at 0 (Frobenius), U' from centered differences of the
  // dense output.
  double residual_stable = 0.0;
  double residual_unstable = 0.0;
  // |U - U_probe| at 0 between runs started from 0 and from -+probe * I.
  double gap_stable = 0.0;
  double gap_unstable = 0.0;
  OdeStatus status = OdeStatus::Ok;
  bool converged = false;
};

RiccatiSplitting riccati_splitting(const MetricModel& model, const PhaseState& start, const RiccatiOptions& options = {});
RiccatiSplitting riccati_splitting(const MetricModel& model, const GeodesicPath& path, const RiccatiOptions& options = {});

// |J(t)| / |J(0)| at the requested times for the perpendicular Jacobi field
// with frame data (j0, jp0) along the geodesic through start, using the frame
// orthonormal_frame(start.p, start.v).
std::vector<double> jacobi_norm_ratios(const MetricModel& model, const PhaseState& start, const Vec& j0, const Vec& jp0,
                                       const std::vector<double>& times, const FlowOptions& options = {});

}  // namespace pinchlab
