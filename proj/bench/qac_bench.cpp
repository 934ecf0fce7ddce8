// Serial reference vs parallel kernels, and indexed lookup vs linear scan.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "qac/evaluate.hpp"
#include "qac/index.hpp"
#include "qac/ingest.hpp"
#include "qac/reference.hpp"
#include "support.hpp"

namespace {

using namespace qac;

const std::string& anchor_corpus() {
  static const std::string text = [] {
    std::mt19937_64 rng(7);
    std::string s;
    for (int i = 0; i < 200'000; ++i) {
      s += "http://site/" + std::to_string(i % 997) + "\t" + testing::random_text(rng, 10, "abcdefg") +
           (i % 3 ? ". " : " | ") + testing::random_text(rng, 10, "abcdefg") + "\n";
    }
    return s;
  }();
  return text;
}

void BM_IngestSerial(benchmark::State& state) {
  anchor_corpus();
  for (auto _ : state) {
    std::istringstream in(anchor_corpus());
    benchmark::DoNotOptimize(reference::ingest_anchors_serial(in));
  }
  state.SetBytesProcessed(state.iterations() * anchor_corpus().size());
}

void BM_IngestParallel(benchmark::State& state) {
  anchor_corpus();
  for (auto _ : state) {
    std::istringstream in(anchor_corpus());
    benchmark::DoNotOptimize(ingest_anchors(in));
  }
  state.SetBytesProcessed(state.iterations() * anchor_corpus().size());
}

struct EvalData {
  CountedSuggestions counted;
  SuggestIndex index;
  std::vector<Suggestion> entries;
  std::vector<std::string> queries;
};

const EvalData& eval_data() {
  static const EvalData data = [] {
    std::mt19937_64 rng(11);
    auto counted = testing::random_counted(rng, 100'000, 14, 200);
    auto index = SuggestIndex::build(counted, {});
    auto entries = reference::to_suggestions(counted);
    std::vector<std::string> queries;
    for (int i = 0; i < 5000; ++i) queries.push_back(entries[rng() % entries.size()].text);
    return EvalData{std::move(counted), std::move(index), std::move(entries), std::move(queries)};
  }();
  return data;
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto& d = eval_data();
  for (auto _ : state) benchmark::DoNotOptimize(reference::evaluate_serial(d.index, d.queries, 10));
  state.SetItemsProcessed(state.iterations() * d.queries.size());
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto& d = eval_data();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(d.index, d.queries, 10));
  state.SetItemsProcessed(state.iterations() * d.queries.size());
}

void BM_LookupIndex(benchmark::State& state) {
  const auto& d = eval_data();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = d.queries[i++ % d.queries.size()];
    benchmark::DoNotOptimize(d.index.lookup(std::string_view(q).substr(0, 2), 10));
  }
}

void BM_LookupBruteForce(benchmark::State& state) {
  const auto& d = eval_data();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& q = d.queries[i++ % d.queries.size()];
    benchmark::DoNotOptimize(reference::brute_force_lookup(d.entries, std::string_view(q).substr(0, 2), 10));
  }
}

BENCHMARK(BM_IngestSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IngestParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LookupIndex)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LookupBruteForce)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
