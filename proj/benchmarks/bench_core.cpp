#include <benchmark/benchmark.h>

#include "weaktime/arrival.hpp"
#include "weaktime/scattering.hpp"
#include "weaktime/time_densities.hpp"
#include "weaktime/two_level.hpp"
#include "weaktime/weak_sim.hpp"

using namespace weaktime;

static void BM_erfc(benchmark::State& state) {
  double x = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(erfc_complex({x, 0.7}));
    x = x > 3.0 ? -3.0 : x + 0.01;
  }
}
BENCHMARK(BM_erfc);

static void BM_amplitudes_rectangular(benchmark::State& state) {
  const Barrier b = Barrier::rectangular(2.0, 5.0);
  double E = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(amplitudes(b, E));
    E = E > 5.0 ? 0.1 : E + 0.001;
  }
}
BENCHMARK(BM_amplitudes_rectangular);

static void BM_density_point(benchmark::State& state) {
  const TimeDensities td(GaussianPacket(1.0, 0.001, -1e4), Barrier::delta(2.0));
  double x = -10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(td.at(x));
    x = x > 10.0 ? -10.0 : x + 0.37;
  }
}
BENCHMARK(BM_density_point);

static void BM_asymptotic(benchmark::State& state) {
  const TimeDensities td(GaussianPacket(1.0, 0.001, -1e4), Barrier::delta(2.0));
  for (auto _ : state) benchmark::DoNotOptimize(td.asymptotic());
}
BENCHMARK(BM_asymptotic)->Unit(benchmark::kMillisecond);

static void BM_pi_matrix_element(benchmark::State& state) {
  const ArrivalConfig cfg{0.3, 1.0, 1.0, 1.0};
  double p = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pi_matrix_element(p, 0.8, cfg));
    p = p > 3.0 ? -3.0 : p + 0.013;
  }
}
BENCHMARK(BM_pi_matrix_element);

static void BM_arrival_distribution(benchmark::State& state) {
  const MomentumPacket pk{1.0, 0.1, -5.0, 5.0};
  for (auto _ : state) benchmark::DoNotOptimize(arrival_distribution(pk, {0.0, 1.0, 1.0, 1.0}));
}
BENCHMARK(BM_arrival_distribution)->Unit(benchmark::kMillisecond);

static void BM_weak_conditional(benchmark::State& state) {
  const auto sys = two_level_system(2.0, std::sqrt(3.0), 0);
  const auto det = DetectorState::gaussian(0.0, 0.0, 1.0, -0.5);
  const auto B = level_projector(1);
  for (auto _ : state) benchmark::DoNotOptimize(weak_value_conditional(sys, det, {1e-3, 1.0}, B));
}
BENCHMARK(BM_weak_conditional)->Unit(benchmark::kMillisecond);

static void BM_two_level_row(benchmark::State& state) {
  const TwoLevelConfig cfg{2.0, std::sqrt(3.0), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(conditional_components(cfg, 1.3, 0));
}
BENCHMARK(BM_two_level_row);
BENCHMARK_MAIN();
