#include <benchmark/benchmark.h>

#include <random>

#include "test_support.h"
#include "titlesim/transport.h"

namespace titlesim {
namespace {

DiscreteDistribution random_distribution(std::size_t n, std::size_t dim,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::normal_distribution<double> g;
  DiscreteDistribution d;
  d.points.assign(n, DenseVector(dim));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : d.points[i]) x = g(rng);
    d.weights.push_back(u(rng));
    total += d.weights.back();
  }
  for (auto& w : d.weights) w /= total;
  return d;
}

void BM_SolveTransport(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const auto a = random_distribution(n, 50, rng);
  const auto b = random_distribution(n, 50, rng);
  const auto cost = ground_cost_matrix(a, b);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_transport(a.weights, b.weights, cost).objective);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveTransport)->RangeMultiplier(2)->Range(2, 64)->Complexity();

void BM_WmdVersusWcd(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto table = testing::random_table(500, 50, rng);
  const auto a = nbow(testing::random_doc(table, 6, 10, rng));
  const auto b = nbow(testing::random_doc(table, 6, 10, rng));
  const bool exact = state.range(0) == 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact ? wmd(a, b, table) : wcd(a, b, table));
  }
  state.SetLabel(exact ? "wmd" : "wcd");
}
BENCHMARK(BM_WmdVersusWcd)->Arg(0)->Arg(1);

}  // namespace
}  // namespace titlesim

BENCHMARK_MAIN();
