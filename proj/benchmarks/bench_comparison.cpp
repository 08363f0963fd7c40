#include "rmtlab/comparison.hpp"
#include "rmtlab/ensemble.hpp"

#include <benchmark/benchmark.h>

namespace {

rmtlab::MatrixSample draw(std::size_t n, rmtlab::EntryLaw law, std::uint64_t seed) {
  rmtlab::EnsembleSpec spec;
  spec.dimension = n;
  spec.law = law;
  return rmtlab::sample_matrix(spec, seed);
}

void BM_SwapSetup(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = draw(n, rmtlab::EntryLaw::two_point_asymmetric, 1);
  const auto xp = draw(n, rmtlab::EntryLaw::gaussian, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::swap_setup(x.entries, xp.entries, n + 2, {1.0, 0.05}, 1.0).m_R);
}
BENCHMARK(BM_SwapSetup)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SvdEntries(benchmark::State& state) {
  const auto x = draw(100, rmtlab::EntryLaw::gaussian, 1);
  Eigen::MatrixXcd q = x.entries;
  q(0, 1) = 0.0;
  q.diagonal().array() -= 1.0;
  const rmtlab::SvdEntries entries(q, 0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::p_coefficients(entries.at({1.0, 0.05})));
}
BENCHMARK(BM_SvdEntries);

void BM_Functionals(benchmark::State& state) {
  const auto x = draw(static_cast<std::size_t>(state.range(0)), rmtlab::EntryLaw::gaussian, 1);
  rmtlab::FunctionalConfig config;
  config.xi_nodes = 4;
  for (auto _ : state) benchmark::DoNotOptimize(rmtlab::evaluate_functionals(x.entries, config).a);
}
BENCHMARK(BM_Functionals)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
