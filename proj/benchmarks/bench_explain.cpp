#include <benchmark/benchmark.h>

#include "tsdiff/explain.hpp"

using namespace tsdiff;

static void BM_ExplainLsq(benchmark::State& state) {
  GenConfig c;
  c.k_max = static_cast<int>(state.range(0));
  c.seed = 5;
  const PairGenerator gen(c);
  std::vector<PairSample> samples = gen.generate(32);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& s = samples[i++ % samples.size()];
    benchmark::DoNotOptimize(explain_lsq(s.reference, s.target));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExplainLsq)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_FeatureEmbed(benchmark::State& state) {
  Rng rng(1);
  const TimeSeries x = synth_sine_mix(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(feature_embed(x));
}
BENCHMARK(BM_FeatureEmbed)->Arg(300)->Arg(3000);

static void BM_RetrievalQuery(benchmark::State& state) {
  GenConfig c;
  c.seed = 6;
  const PairGenerator gen(c);
  const RetrievalPool pool = RetrievalPool::build(gen, static_cast<std::size_t>(state.range(0)));
  c.seed = 7;
  const PairSample q = PairGenerator(c).sample(0);
  for (auto _ : state) benchmark::DoNotOptimize(explain_retrieval(q.reference, q.target, pool));
}
BENCHMARK(BM_RetrievalQuery)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);
