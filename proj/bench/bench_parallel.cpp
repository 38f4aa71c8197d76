#include <benchmark/benchmark.h>

#include "mgk/coalgebra.hpp"
#include "mgk/logic.hpp"
#include "mgk/random.hpp"

namespace {

using namespace mgk;

MarkovKernel kernel_on(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  auto space = share(FinMeasurableSpace::discrete(index_labels(n)));
  return random_kernel(rng, space, space, 16);
}

template <bool Parallel>
void kleisli(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MarkovKernel k = kernel_on(n, 1);
  const MarkovKernel l = kernel_on(n, 2);
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(kleisli_compose(l, k));
    } else {
      benchmark::DoNotOptimize(kleisli_compose_serial(l, k));
    }
  }
}

template <bool Parallel>
void refinement(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  KripkeModel m;
  m.space = share(FinMeasurableSpace::discrete(index_labels(n)));
  Rng rng(3);
  // Few distinct row values so refinement takes several rounds.
  m.kernels.emplace("a", random_kernel(rng, m.space, m.space, 2));
  m.kernels.emplace("b", random_kernel(rng, m.space, m.space, 2));
  m.valuations.emplace("p", rng.subset(n));
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(equivalence_partition(m));
    } else {
      benchmark::DoNotOptimize(equivalence_partition_serial(m));
    }
  }
}

template <bool Parallel>
void sweep(benchmark::State& state) {
  for (auto _ : state) {
    if constexpr (Parallel) {
      benchmark::DoNotOptimize(aczel_sweep(2));
    } else {
      benchmark::DoNotOptimize(aczel_sweep_serial(2));
    }
  }
}

}  // namespace

BENCHMARK(kleisli<true>)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(kleisli<false>)->Arg(8)->Arg(16)->Arg(32);
BENCHMARK(refinement<true>)->Arg(16)->Arg(32)->Arg(48);
BENCHMARK(refinement<false>)->Arg(16)->Arg(32)->Arg(48);
BENCHMARK(sweep<true>)->Unit(benchmark::kMillisecond);
BENCHMARK(sweep<false>)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
