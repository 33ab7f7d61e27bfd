#include <benchmark/benchmark.h>

#include "tsdiff/pairgen.hpp"
#include "tsdiff/schema.hpp"

using namespace tsdiff;

namespace {

ExplanationList sample_list() {
  GenConfig c;
  c.k_max = 4;
  c.k_min = 4;
  return PairGenerator(c).sample(0).ground_truth;
}

}  // namespace

static void BM_Serialize(benchmark::State& state) {
  const ExplanationList list = sample_list();
  for (auto _ : state) benchmark::DoNotOptimize(serialize(list, 300));
}
BENCHMARK(BM_Serialize);

static void BM_ParseStrict(benchmark::State& state) {
  const std::string text = serialize(sample_list());
  for (auto _ : state) benchmark::DoNotOptimize(parse(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseStrict);

static void BM_ParseLenient(benchmark::State& state) {
  const std::string text = serialize(sample_list());
  for (auto _ : state) benchmark::DoNotOptimize(parse(text, ParseMode::Lenient));
}
BENCHMARK(BM_ParseLenient);
