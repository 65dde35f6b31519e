#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "aosa/knn_index.hpp"
#include "aosa/protocol.hpp"
#include "aosa/scoring.hpp"
#include "aosa/synthetic.hpp"
#include "aosa/theory.hpp"

namespace {

aosa::FeatureStore make_store(std::size_t n, std::uint32_t dim) {
  aosa::SyntheticSpec spec;
  spec.per_cluster = n / spec.n_clusters;
  spec.dim = dim;
  spec.seed = 1;
  return aosa::generate_synthetic(spec);
}

aosa::KnnIndex make_index(const aosa::FeatureStore& store) {
  aosa::KnnIndex index(store.dim());
  for (std::size_t r = 0; r < store.size(); ++r) index.add(store.id(r), store.label(r), store.feature(r));
  return index;
}

void BM_IndexBuild(benchmark::State& state) {
  const auto store = make_store(static_cast<std::size_t>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(make_index(store));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(store.size()));
}
BENCHMARK(BM_IndexBuild)->Arg(1200)->Arg(12000);

void BM_KnnQuery(benchmark::State& state) {
  const auto store = make_store(static_cast<std::size_t>(state.range(0)), 64);
  const auto index = make_index(store);
  const auto K = static_cast<std::size_t>(state.range(1));
  std::size_t row = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.query(store.feature(row), K));
    row = (row + 1) % store.size();
  }
}
BENCHMARK(BM_KnnQuery)->Args({1200, 10})->Args({12000, 10})->Args({12000, 50});

void BM_InconsistencyScore(benchmark::State& state) {
  const auto C = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> p(C), v(C);
  double s = 0.0;
  for (auto& x : p) s += (x = ex(rng));
  for (auto& x : p) x /= s;
  for (auto& x : v) x = static_cast<double>(rng() % 5);
  for (auto _ : state) benchmark::DoNotOptimize(aosa::inconsistency_score(p, v));
}
BENCHMARK(BM_InconsistencyScore)->Arg(2)->Arg(10)->Arg(100);

void BM_Bound(benchmark::State& state) {
  const auto K = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(aosa::detection_error_bound({K, 0.1, 2.0, 0.5, 0.01}));
}
BENCHMARK(BM_Bound)->Arg(10)->Arg(50);

void BM_ProtocolRound(benchmark::State& state) {
  const auto store = make_store(2000, 16);
  aosa::ProtocolConfig cfg;
  cfg.rounds = 1;
  cfg.budget = 50;
  cfg.known = {0, 1, 2};
  cfg.strategy = static_cast<aosa::StrategyKind>(state.range(0));
  cfg.train.epochs = 20;
  for (auto _ : state) benchmark::DoNotOptimize(aosa::run_protocol(cfg, store));
  state.SetLabel(std::string(aosa::strategy_name(cfg.strategy)));
}
BENCHMARK(BM_ProtocolRound)
    ->Arg(static_cast<int>(aosa::StrategyKind::neat))
    ->Arg(static_cast<int>(aosa::StrategyKind::random))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
