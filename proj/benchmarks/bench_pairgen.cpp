#include <benchmark/benchmark.h>

#include "tsdiff/pairgen.hpp"

using namespace tsdiff;

static void BM_Evaluate(benchmark::State& state) {
  const auto& cat = default_catalog();
  Rng rng(1);
  const auto& spec = cat.spec(static_cast<FuncId>(state.range(0)));
  const ParamVector theta = sample_base_params(spec, rng);
  const Interval iv = sample_interval(spec, cat.length(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(spec, theta, iv, cat.length(), 7));
  state.SetLabel(std::string(spec.name()));
}
BENCHMARK(BM_Evaluate)
    ->Arg(static_cast<int>(FuncId::Sigmoid))
    ->Arg(static_cast<int>(FuncId::TriangleWave))
    ->Arg(static_cast<int>(FuncId::LaplaceNoise));

static void BM_Sample(benchmark::State& state) {
  GenConfig c;
  c.k_max = static_cast<int>(state.range(0));
  c.seed = 3;
  const PairGenerator gen(c);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gen.sample(i++));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Sample)->Arg(1)->Arg(4);

static void BM_GenerateParallel(benchmark::State& state) {
  GenConfig c;
  c.k_max = 4;
  const PairGenerator gen(c);
  for (auto _ : state) benchmark::DoNotOptimize(gen.generate(1000, static_cast<unsigned>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_GenerateParallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
