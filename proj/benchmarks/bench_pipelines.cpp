#include <benchmark/benchmark.h>

#include "dgs/aspect.hpp"
#include "dgs/explore.hpp"
#include "dgs/hopset.hpp"
#include "dgs/spanner.hpp"
#include "dgs/stream.hpp"

using namespace dgs;

namespace {

MultipassStream make_graph(Vertex n, std::size_t m, std::int64_t max_weight,
                           WeightDistribution dist = WeightDistribution::Uniform) {
  GeneratorOptions o;
  o.n = n;
  o.target_edges = m;
  o.churn = 1;
  o.seed = 42;
  o.weighted = max_weight > 0;
  o.max_weight = Weight::from_int(std::max<std::int64_t>(1, max_weight));
  o.distribution = dist;
  return generate_stream(o);
}

HopsetOverrides desk_overrides() {
  HopsetOverrides o;
  o.phase_epsilon = 0.5;
  o.chi = 0.25;
  return o;
}

}  // namespace

static void BM_BfsForest(benchmark::State& state) {
  const auto n = static_cast<Vertex>(state.range(0));
  const auto base = make_graph(n, 3 * n, 0);
  std::size_t passes = 0;
  for (auto _ : state) {
    auto s = base.replay();
    BfsOptions o;
    o.depth = 5;
    benchmark::DoNotOptimize(bfs_forest(s, {1}, o));
    passes = s.passes_taken();
  }
  state.counters["passes"] = static_cast<double>(passes);
}
BENCHMARK(BM_BfsForest)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_ApproxBellmanFord(benchmark::State& state) {
  const auto n = static_cast<Vertex>(state.range(0));
  const auto base = make_graph(n, 3 * n, 32);
  for (auto _ : state) {
    auto s = base.replay();
    BellmanFordOptions o;
    o.hops = 6;
    o.high = Weight::from_int(32 * static_cast<std::int64_t>(n));
    benchmark::DoNotOptimize(approx_bellman_ford(s, {{1}}, o));
  }
}
BENCHMARK(BM_ApproxBellmanFord)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Spanner(benchmark::State& state) {
  const auto n = static_cast<Vertex>(state.range(0));
  const auto base = make_graph(n, 3 * n, 0);
  std::size_t size = 0, passes = 0;
  for (auto _ : state) {
    auto s = base.replay();
    SpannerConfig cfg;
    const auto r = build_spanner(s, 0.5, 4, 0.5, cfg);
    size = r.edges.size();
    passes = r.passes;
  }
  state.counters["edges"] = static_cast<double>(size);
  state.counters["passes"] = static_cast<double>(passes);
}
BENCHMARK(BM_Spanner)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_Hopset(benchmark::State& state) {
  const auto n = static_cast<Vertex>(state.range(0));
  const auto base = make_graph(n, 3 * n, 8);
  std::size_t size = 0, passes = 0;
  for (auto _ : state) {
    auto s = base.replay();
    HopsetConfig cfg;
    const auto r = multi_scale_hopset(s, 0.5, 2, 0.5, 256, cfg, desk_overrides());
    size = r.edges.size();
    passes = r.passes;
  }
  state.counters["edges"] = static_cast<double>(size);
  state.counters["passes"] = static_cast<double>(passes);
}
BENCHMARK(BM_Hopset)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_ComputeNodes(benchmark::State& state) {
  const auto n = static_cast<Vertex>(state.range(0));
  const auto base = make_graph(n, 3 * n, 1 << 20, WeightDistribution::LogUniform);
  for (auto _ : state) {
    auto s = base.replay();
    NodeOptions o;
    benchmark::DoNotOptimize(compute_nodes(s, 0.5 / 24, 2, 29, o));
  }
}
BENCHMARK(BM_ComputeNodes)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
