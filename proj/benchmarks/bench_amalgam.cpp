#include "amalgam/diagnostics.hpp"

#include <benchmark/benchmark.h>

using namespace amalgam;

namespace {

void BM_EnumerateNc(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nc::enumerate_nc(n));
}
BENCHMARK(BM_EnumerateNc)->DenseRange(6, 10, 2);

void BM_KrewerasAll(benchmark::State& state) {
  const auto list = nc::enumerate_nc(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    for (const auto& p : list) benchmark::DoNotOptimize(nc::kreweras(p));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(list.size()));
}
BENCHMARK(BM_KrewerasAll)->Arg(8)->Arg(10);

void BM_MobiusInterval(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto& lattice = nc::NcLattice::get(n);
  const auto& elements = lattice.elements();
  std::size_t top = 0;
  while (elements[top] != nc::SetPartition::full(n)) ++top;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lattice.mobius(i % elements.size(), top));
    ++i;
  }
}
BENCHMARK(BM_MobiusInterval)->Arg(6)->Arg(8);

void BM_MomentsFromCumulants(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto s = static_cast<std::size_t>(state.range(1));
  const auto order = static_cast<std::size_t>(state.range(2));
  const auto c = random_spec(1, d, s, order);
  for (auto _ : state) benchmark::DoNotOptimize(moments_from_cumulants(c));
}
BENCHMARK(BM_MomentsFromCumulants)->Args({1, 1, 10})->Args({2, 1, 5})->Args({2, 2, 4})->Unit(benchmark::kMillisecond);

void BM_CumulantsFromMoments(benchmark::State& state) {
  const auto m = random_moment_spec(1, 2, static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(cumulants_from_moments(m));
}
BENCHMARK(BM_CumulantsFromMoments)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_BoxedConvolution(benchmark::State& state) {
  const auto order = static_cast<std::size_t>(state.range(0));
  const auto f = random_spec(2, 2, 1, order);
  const auto g = random_spec(3, 2, 1, order);
  for (auto _ : state) benchmark::DoNotOptimize(boxed_convolution(f, g));
}
BENCHMARK(BM_BoxedConvolution)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EvenProductHarness(benchmark::State& state) {
  const auto order = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(verify_even_product_pair(seed++, 2, order));
}
BENCHMARK(BM_EvenProductHarness)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
