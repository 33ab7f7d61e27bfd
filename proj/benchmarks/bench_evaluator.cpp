#include <benchmark/benchmark.h>

#include "tsdiff/evaluator.hpp"
#include "tsdiff/pairgen.hpp"

using namespace tsdiff;

static void BM_EvaluateDataset(benchmark::State& state) {
  GenConfig c;
  c.k_max = 4;
  const PairGenerator gen(c);
  std::vector<IdentifiedList> gts;
  std::vector<IdentifiedList> preds;
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (std::uint64_t i = 0; i < n; ++i) {
    const PairSample s = gen.sample(i);
    gts.push_back({s.id, s.ground_truth});
    // Shift every prediction so IoU and matching do real work.
    ExplanationList shifted = s.ground_truth;
    for (auto& r : shifted) r.start = std::max(0, r.start - 3);
    preds.push_back({s.id, shifted});
  }
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_dataset(preds, gts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateDataset)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Align(benchmark::State& state) {
  GenConfig c;
  c.k_min = c.k_max = 8;
  const PairGenerator gen(c);
  const PairSample a = gen.sample(0);
  const PairSample b = gen.sample(1);
  for (auto _ : state) benchmark::DoNotOptimize(align(a.ground_truth, b.ground_truth));
}
BENCHMARK(BM_Align);
