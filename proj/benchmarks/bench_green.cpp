#include "rmtlab/ensemble.hpp"
#include "rmtlab/green.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_Green(benchmark::State& state) {
  rmtlab::EnsembleSpec spec;
  spec.dimension = static_cast<std::size_t>(state.range(0));
  const auto sample = rmtlab::sample_matrix(spec, 3);
  const rmtlab::MinorIndex minor{{0, 1}, {2}};
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::green(sample, {0.4, 0.1}, {1.0, 0.1}, minor).m_G);
}
BENCHMARK(BM_Green)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMillisecond);

void BM_MinorIdentities(benchmark::State& state) {
  rmtlab::EnsembleSpec spec;
  spec.dimension = 64;
  const auto sample = rmtlab::sample_matrix(spec, 3);
  const auto g = rmtlab::green(sample, {0.4, 0.1}, {1.0, 0.1}, {{0}, {1}});
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::minor_identity_residual(g, 5));
}
BENCHMARK(BM_MinorIdentities)->Unit(benchmark::kMillisecond);

}  // namespace
