#include "rmtlab/ensemble.hpp"
#include "rmtlab/spectra.hpp"

#include <benchmark/benchmark.h>

namespace {

rmtlab::MatrixSample ginibre(std::size_t n) {
  rmtlab::EnsembleSpec spec;
  spec.dimension = n;
  return rmtlab::sample_matrix(spec, 7);
}

void BM_SampleMatrix(benchmark::State& state) {
  rmtlab::EnsembleSpec spec;
  spec.dimension = static_cast<std::size_t>(state.range(0));
  spec.law = rmtlab::EntryLaw::two_point_asymmetric;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::sample_matrix(spec, seed++));
}
BENCHMARK(BM_SampleMatrix)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Eigenvalues(benchmark::State& state) {
  const auto sample = ginibre(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::eigenvalues(sample));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Eigenvalues)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_SingularSquares(benchmark::State& state) {
  const auto sample = ginibre(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::singular_squares(sample, {0.5, 0.1}));
}
BENCHMARK(BM_SingularSquares)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_GirkoRhs(benchmark::State& state) {
  const auto sample = ginibre(64);
  const rmtlab::TestFunctionSpec f{rmtlab::Bump{}, {0.2, 0.1}, 0.25, 64};
  rmtlab::GirkoGrid grid;
  grid.nodes_per_side = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::girko_rhs(f, sample, grid).value);
}
BENCHMARK(BM_GirkoRhs)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace
