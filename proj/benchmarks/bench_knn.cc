#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "test_support.h"
#include "titlesim/knn.h"

namespace titlesim {
namespace {

struct Fixture {
  std::shared_ptr<EmbeddingTable> table;
  std::vector<LabeledRef> refs;
  std::vector<Document> queries;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    std::mt19937_64 rng(3);
    Fixture f;
    f.table = std::make_shared<EmbeddingTable>(testing::random_table(2000, 50, rng));
    for (std::size_t i = 0; i < 10000; ++i) {
      f.refs.push_back(testing::labeled("r" + std::to_string(i),
                                        testing::random_doc(*f.table, 2, 10, rng).raw,
                                        "c" + std::to_string(i % 500)));
    }
    for (std::size_t i = 0; i < 64; ++i) {
      f.queries.push_back(testing::random_doc(*f.table, 2, 6, rng, "q"));
    }
    return f;
  }();
  return f;
}

Resources resources_for(Strategy s, const Fixture& f) {
  Resources res;
  if (s == Strategy::kBowCosine) {
    std::vector<Document> docs;
    for (const auto& r : f.refs) docs.push_back(r.doc);
    res.stats = std::make_shared<CorpusStats>(build_corpus_stats(docs));
  } else {
    res.embeddings = f.table;
  }
  return res;
}

void BM_Classify(benchmark::State& state) {
  const auto strategy = static_cast<Strategy>(state.range(0));
  const auto& f = fixture();
  const auto index = KnnIndex::build(f.refs, strategy, resources_for(strategy, f));
  std::size_t q = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify(index, f.queries[q++ % f.queries.size()], kDefaultK));
  }
  state.SetLabel(std::string(strategy_name(strategy)) + " / 10000 refs");
}
BENCHMARK(BM_Classify)
    ->Arg(static_cast<int>(Strategy::kBowCosine))
    ->Arg(static_cast<int>(Strategy::kAvgW2V))
    ->Arg(static_cast<int>(Strategy::kWmd))
    ->Unit(benchmark::kMillisecond);

void BM_WmdExhaustiveVersusPruned(benchmark::State& state) {
  const auto& f = fixture();
  const std::vector<LabeledRef> refs(f.refs.begin(), f.refs.begin() + 2000);
  const auto index = KnnIndex::build(refs, Strategy::kWmd, resources_for(Strategy::kWmd, f));
  const bool pruned = state.range(0) == 1;
  std::size_t q = 0;
  for (auto _ : state) {
    const auto rep = index.represent(f.queries[q++ % f.queries.size()]);
    if (pruned) {
      benchmark::DoNotOptimize(index.search_wmd_pruned(std::get<NBow>(rep), kDefaultK,
                                                        default_prefetch(kDefaultK)));
    } else {
      benchmark::DoNotOptimize(index.search(rep, kDefaultK));
    }
  }
  state.SetLabel(pruned ? "pruned" : "exhaustive");
}
BENCHMARK(BM_WmdExhaustiveVersusPruned)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace titlesim

BENCHMARK_MAIN();
