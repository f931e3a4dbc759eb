#include <cmath>
#include <span>

#include <benchmark/benchmark.h>

#include "frw/odekit.hpp"

using namespace frw::ode;

namespace {

const VectorField osc = [](double, std::span<const double> y, std::span<double> dy) {
  dy[0] = y[1];
  dy[1] = -y[0];
};

void BM_DopriOscillator(benchmark::State& state) {
  IntegratorSettings s;
  s.rel_tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  s.abs_tol = s.rel_tol * 1e-2;
  std::size_t steps = 0;
  for (auto _ : state) {
    const auto sol = integrate(osc, {1.0, 0.0}, {0.0, 50.0}, s);
    steps = sol.accepted_steps;
    benchmark::DoNotOptimize(sol.y.back()[0]);
  }
  state.counters["steps"] = static_cast<double>(steps);
}
BENCHMARK(BM_DopriOscillator)->DenseRange(6, 12, 3);

void BM_DopriEvents(benchmark::State& state) {
  const EventSpec specs[] = {{EventKind::TurningPoint, [](double, std::span<const double> y) { return y[1]; },
                              Crossing::Any, false}};
  for (auto _ : state) {
    const auto sol = integrate(osc, {1.0, 0.0}, {0.0, 50.0}, IntegratorSettings{}, specs);
    benchmark::DoNotOptimize(sol.events.size());
  }
}
BENCHMARK(BM_DopriEvents);

void BM_Rk4(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rk4(osc, {1.0, 0.0}, {0.0, 50.0}, n)[0]);
}
BENCHMARK(BM_Rk4)->RangeMultiplier(4)->Range(256, 16384);

}  // namespace

BENCHMARK_MAIN();
