#include <Eigen/Dense>
#include <benchmark/benchmark.h>

#include "frw/geometry.hpp"

using namespace frw::geometry;

namespace {

const ScaleState kState{0.3, 1.7, 0.4, -0.2};

void BM_ClosedFormCurvature(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(curvature(kState, SpatialCurvature(1.0), {0.4, 1.1, 0.0}).ricci_scalar_4);
  }
}
BENCHMARK(BM_ClosedFormCurvature);

// The library's own finite-difference oracle, for scale against the closed form.
void BM_NumericCurvatureOracle(benchmark::State& state) {
  const MetricField g = frw_metric(kState, SpatialCurvature(1.0));
  const Eigen::VectorXd x = frw_coordinates(0.3, {0.4, 1.1, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(numeric_curvature_oracle(g, x).ricci_scalar_4);
}
BENCHMARK(BM_NumericCurvatureOracle);

}  // namespace

BENCHMARK_MAIN();
