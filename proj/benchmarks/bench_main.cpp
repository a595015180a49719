#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "lens/analytics.hpp"
#include "lens/fixtures.hpp"
#include "lens/ingest.hpp"
#include "lens/labeler.hpp"
#include "lens/stats.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(eng);
  return v;
}

void BM_Spearman(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto x = random_vector(n, 1);
  auto y = random_vector(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lens::stats::spearman(x, y));
  }
}
BENCHMARK(BM_Spearman)->Arg(10)->Arg(100)->Arg(1000);

void BM_LabelBlock(benchmark::State& state) {
  auto spec = lens::fixtures::default_scenario();
  spec.n_blocks = 4;
  spec.txs_per_block = static_cast<int>(state.range(0));
  auto corpus = lens::fixtures::generate(spec, "bench_fixture");
  lens::RegistrySet registries;
  for (const auto& [kind, path] : corpus.registry_paths) {
    registries.by_kind[kind] = lens::ingest::load_registry(path, kind);
  }
  lens::ingest::LoadReport report;
  auto blocks = lens::ingest::load_blocks(corpus.blocks_path, registries, report);
  for (auto _ : state) {
    for (const auto& block : blocks) {
      benchmark::DoNotOptimize(lens::labeler::label_block(block, registries));
    }
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(blocks.size() * spec.txs_per_block));
}
BENCHMARK(BM_LabelBlock)->Arg(30)->Arg(150);

void BM_Entropy(benchmark::State& state) {
  std::vector<double> composition(12, 1.0 / 12.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lens::analytics::shannon_entropy(composition));
  }
}
BENCHMARK(BM_Entropy);

}  // namespace

BENCHMARK_MAIN();
