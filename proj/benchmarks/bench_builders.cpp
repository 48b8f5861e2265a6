#include <benchmark/benchmark.h>

#include "freezetree/builders.hpp"
#include "freezetree/continuum.hpp"
#include "freezetree/sequences.hpp"

using namespace freezetree;

namespace {

FreezeSequence critical(std::size_t n) { return profile_sequence(n, {0.5, PowerShape{0.5}}); }

void BM_Forward(benchmark::State& state) {
  const auto seq = critical(static_cast<std::size_t>(state.range(0)));
  Rng rng = make_rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(build_forward(seq, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

void BM_Coalescent(benchmark::State& state) {
  const auto seq = critical(static_cast<std::size_t>(state.range(0)));
  Rng rng = make_rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(build_coalescent(seq, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Coalescent)->RangeMultiplier(10)->Range(1000, 1000000)->Unit(benchmark::kMillisecond);

void BM_CoalTime(benchmark::State& state) {
  const auto seq = critical(static_cast<std::size_t>(state.range(0)));
  Rng rng = make_rng(3);
  const auto built = build_coalescent(seq, rng);
  const std::size_t size = built.tree.size();
  for (auto _ : state) {
    const auto u = static_cast<VertexId>(uniform_index(rng, size));
    const auto v = static_cast<VertexId>(uniform_index(rng, size));
    benchmark::DoNotOptimize(coal_time(built.genealogy, u, v));
  }
}
BENCHMARK(BM_CoalTime)->Arg(10000)->Arg(1000000);

void BM_FunctionTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(FunctionTable::power(0.25));
}
BENCHMARK(BM_FunctionTable)->Unit(benchmark::kMillisecond);

void BM_SampleCoalescent(benchmark::State& state) {
  const auto table = FunctionTable::power(0.25);
  Rng rng = make_rng(4);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_coalescent(table, k, rng));
}
BENCHMARK(BM_SampleCoalescent)->Arg(2)->Arg(10)->Arg(100);

}  // namespace

// The packaged benchmark_main archive carries LTO bytecode from another compiler build.
BENCHMARK_MAIN();
