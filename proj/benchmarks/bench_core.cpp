#include "pinchlab/comparison.hpp"
#include "pinchlab/gtmetric.hpp"

#include <benchmark/benchmark.h>

using namespace pinchlab;

namespace {

const MetricModel& cone() {
  static const MetricModel m = gt_cone_model(SmoothingSpec::with_quarter_r0(2, 6.0), 1, 30.0);
  return m;
}

void BM_GeodesicCone(benchmark::State& state) {
  const PhaseState s{Point{2.0, 0.0, 0.1}, Vec{{0.0, 0.1, 0.2}}};
  FlowOptions o;
  o.tol = 1e-10;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_geodesic(cone(), s, static_cast<double>(state.range(0)), o));
}
BENCHMARK(BM_GeodesicCone)->Arg(1)->Arg(5)->Arg(20);

void BM_DphiNorm(benchmark::State& state) {
  FlowOptions o;
  o.tol = 1e-10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dphi_operator_norm(cone(), Hypersurface::cone_reflection_slice(), Point{2.0, 0.0, 0.3}, 6.0, o));
  }
}
BENCHMARK(BM_DphiNorm);

void BM_CurvatureScan(benchmark::State& state) {
  const std::vector<AxisRange> grid{{1e-3, 7.0, static_cast<std::size_t>(state.range(0))}, {0, 0, 1}, {0, 0, 1}};
  ScanOptions opt;
  opt.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(curvature_range_scan(cone(), grid, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CurvatureScan)->Arg(100)->Arg(400);

void BM_ShootingFermi(benchmark::State& state) {
  const MetricModel m = MetricModel::hyperbolic_fermi(2);
  const Point p{0.1, 0.8, -0.5}, pp{1.2, 2.0, 1.1};
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_distance_bvp(m, p, pp));
}
BENCHMARK(BM_ShootingFermi);

void BM_ShootingCone(benchmark::State& state) {
  const Point p{2.0, 0.1, 0.0}, pp{3.1, -0.2, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_distance_bvp(cone(), p, pp));
}
BENCHMARK(BM_ShootingCone);

}  // namespace
BENCHMARK_MAIN();
