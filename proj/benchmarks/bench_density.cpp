#include "rmtlab/density.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_McSolve(benchmark::State& state) {
  double e = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rmtlab::mc_solve({e, 1e-3}, {0.7, 0.2}).m);
    e = e > 6.0 ? 0.1 : e + 0.01;
  }
}
BENCHMARK(BM_McSolve);

void BM_RhoC(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::rho_c(1.3, {0.5, 0.0}));
}
BENCHMARK(BM_RhoC);

void BM_DensityCdf(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::DensityCdf({0.5, 0.0}, static_cast<int>(state.range(0))).mass());
}
BENCHMARK(BM_DensityCdf)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace
