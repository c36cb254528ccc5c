#include <benchmark/benchmark.h>

#include "csq/chern.hpp"
#include "csq/models.hpp"
#include "csq/numerics.hpp"
#include "csq/quantize.hpp"
#include "csq/starprod.hpp"

using namespace csq;

static void BM_SphereKernel(benchmark::State& state) {
  const auto m = models::ModelSpace::sphere(static_cast<int>(state.range(0)));
  const auto x = models::ChartPoint::main({0.3, -0.2});
  const auto y = models::ChartPoint::main({-0.7, 0.4});
  for (auto _ : state) benchmark::DoNotOptimize(models::kernel(m, x, y));
}
BENCHMARK(BM_SphereKernel)->Arg(4)->Arg(64);

static void BM_Resolution(benchmark::State& state) {
  const auto m = models::ModelSpace::sphere(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(quantize::resolution_of_identity(m));
}
BENCHMARK(BM_Resolution)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_Chern(benchmark::State& state) {
  const auto m = models::ModelSpace::sphere(3);
  const auto mesh = numerics::icosphere(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(chern::chern_number(m, mesh));
}
BENCHMARK(BM_Chern)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_StarProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto x1 = starprod::SpherePoly::coordinate(1);
  const auto x3 = starprod::SpherePoly::coordinate(3);
  const auto a = starprod::poly_to_coeff(x1 * x3, n);
  const auto b = starprod::poly_to_coeff(x3 * x3, n);
  for (auto _ : state) benchmark::DoNotOptimize(starprod::star(a, b));
}
BENCHMARK(BM_StarProduct)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_PodlesSeries(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(models::build_podles_series(0.5, models::PodlesOptions{}));
}
BENCHMARK(BM_PodlesSeries)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
