#include <benchmark/benchmark.h>

#include "frw/bransdicke.hpp"
#include "frw/flow.hpp"
#include "frw/friedmann.hpp"
#include "frw/minisuperspace.hpp"

using namespace frw;
using geometry::SpatialCurvature;

namespace {

void BM_FlowDirect(benchmark::State& state) {
  flow::FlowProblem p;
  p.kappa = SpatialCurvature(-1.0);
  p.a_dot0 = 0.5;
  p.t_end = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(flow::integrate_flow(p).samples.size());
}
BENCHMARK(BM_FlowDirect);

void BM_FriedmannDustRadiation(benchmark::State& state) {
  friedmann::FriedmannProblem p;
  p.background = {{friedmann::FluidModel::dust(1.0), friedmann::FluidModel::radiation(0.2)}, 1.0, 0.0,
                  SpatialCurvature(0.0)};
  p.t_end = 100.0;
  p.grid = ode::uniform_grid({0.0, 100.0}, 1001);
  for (auto _ : state) benchmark::DoNotOptimize(friedmann::integrate_friedmann(p).samples.size());
}
BENCHMARK(BM_FriedmannDustRadiation);

void BM_BransDickeInflaton(benchmark::State& state) {
  bd::BDProblem p;
  p.params.coupling = 500.0;
  p.params.matter = bd::InflatonMatter{bd::Polynomial{{0.0, 0.0, 0.5}}};
  p.initial = {0.0, 1.0, 1.0, 1.0, 0.0, 0.0, bd::InflatonField{1.0, 0.0}};
  p.completion = bd::Completion::Hubble;
  p.t_end = 20.0;
  for (auto _ : state) benchmark::DoNotOptimize(bd::integrate_bransdicke(p).samples.size());
}
BENCHMARK(BM_BransDickeInflaton);

void BM_WdwEquivalence(benchmark::State& state) {
  const wdw::SampleBox box{0.5, 2.0, -1.0, 1.0, static_cast<std::size_t>(state.range(0))};
  const auto psi = wdw::gaussian(wdw::Coordinate::A);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wdw::change_of_variables_check(psi, {1.0, 1.0, 1.0}, box).max_relative_deviation);
  }
}
BENCHMARK(BM_WdwEquivalence)->Arg(10)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
