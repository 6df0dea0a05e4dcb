#include <benchmark/benchmark.h>

#include "dgs/encoding.hpp"
#include "dgs/hashing.hpp"
#include "dgs/random.hpp"
#include "dgs/samplers.hpp"

using namespace dgs;

static void BM_PairwiseHash(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const auto h = PairwiseHash::sample(n, 1);
  std::uint64_t x = 1, acc = 0;
  for (auto _ : state) {
    acc += h(x);
    x = x == n ? 1 : x + 1;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_PairwiseHash)->Arg(1 << 10)->Arg(1 << 20)->Arg(1 << 30);

static void BM_OneSparseUpdate(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const auto cb = codebook_for(n);
  OneSparseSketch sk;
  std::uint32_t i = 1;
  for (auto _ : state) {
    sk.update(*cb, i, +1);
    i = i == n ? 1 : i + 1;
  }
  benchmark::DoNotOptimize(sk);
}
BENCHMARK(BM_OneSparseUpdate)->Arg(1 << 10)->Arg(1 << 16);

static void BM_OneSparseRecover(benchmark::State& state) {
  const auto cb = codebook_for(1 << 16);
  OneSparseSketch sk;
  sk.update(*cb, 777, 3);
  for (auto _ : state) benchmark::DoNotOptimize(one_sparse_recover(sk, *cb));
}
BENCHMARK(BM_OneSparseRecover);

static void BM_L0Sample(benchmark::State& state) {
  const std::uint32_t n = 1024;
  const auto cb = codebook_for(n);
  Rng rng(1);
  std::vector<CoordinateUpdate> ups;
  for (int k = 0; k < state.range(0); ++k) ups.push_back({static_cast<std::uint32_t>(rng.between(1, n)), 1});
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(l0_sample(ups, 0.05, cb, ++seed));
}
BENCHMARK(BM_L0Sample)->Arg(16)->Arg(256);

static void BM_ParentSamplerAdd(benchmark::State& state) {
  const Vertex n = 1 << 12;
  const auto hashes = sample_family(static_cast<std::size_t>(state.range(0)), n, ceil_log2(n), 3);
  LevelTable table(hashes);
  for (Vertex y = 1; y <= n; ++y) table.prepare(y);
  ParentSampler p(table);
  Vertex y = 1;
  for (auto _ : state) {
    p.add(y, +1);
    y = y == n ? 1 : y + 1;
  }
  benchmark::DoNotOptimize(p.bank());
}
BENCHMARK(BM_ParentSamplerAdd)->Arg(8)->Arg(64);
