#include <cmath>
#include <algorithm>
#include <set>

#include "dgs/oracle.hpp"
#include "dgs/spanner.hpp"
#include "support.hpp"

using namespace dgs;
using dgs::test::random_stream;
using dgs::test::unweighted_of;

TEST_CASE("spanner schedule at n = 10^4") {
  const auto p = spanner_schedule(10'000, 0.5, 4, 0.5);
  CHECK(p.i0 == 1);
  CHECK(p.ell == 3);
  CHECK(p.delta[0] == doctest::Approx(1));
  CHECK(p.radius[1] == doctest::Approx(1));
  CHECK(p.delta[1] == doctest::Approx(6));
  CHECK(p.deg[0] == doctest::Approx(10));
  for (int i = 1; i <= 3; ++i) CHECK(p.deg[i] == doctest::Approx(100));
  CHECK(p.beta == doctest::Approx(216));
}

TEST_CASE("spanner schedule rejects bad parameters") {
  CHECK_THROWS_AS(spanner_schedule(100, 0, 4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(spanner_schedule(100, 1, 4, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(spanner_schedule(100, 0.5, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(spanner_schedule(100, 0.5, 4, 0.6), std::invalid_argument);
  CHECK_THROWS_AS(spanner_schedule(100, 0.5, 4, 0.2), std::invalid_argument);
}

TEST_CASE("prune_tree drops branches without kept vertices") {
  std::vector<std::uint8_t> keep(6, 0);
  keep[3] = 1;
  const auto e = prune_tree({{2, 1}, {3, 2}, {4, 2}, {5, 1}}, 1, keep);
  CHECK(e == std::vector<Edge>{{1, 2}, {2, 3}});
  keep[3] = 0;
  CHECK(prune_tree({{2, 1}, {3, 2}}, 1, keep).empty());
}

TEST_CASE("a tree is its own spanner") {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 2; v <= 40; ++v) edges.emplace_back(v / 2, v);
  auto s = unweighted_of(40, edges);
  SpannerConfig cfg;
  cfg.seed = 3;
  const auto r = build_spanner(s, 0.5, 4, 0.5, cfg);
  CHECK(r.edges == final_graph(s).edges());
}

TEST_CASE("superclustering from singletons") {
  auto s = random_stream(80, 240, 4);
  const Graph g = final_graph(s);
  const auto params = spanner_schedule(80, 0.5, 4, 0.5);
  SpannerConfig cfg;
  cfg.seed = 11;
  const auto base = ClusterPartition::singletons(80);
  const auto r = superclustering_step(s, base, params, 0, cfg);
  std::set<Vertex> covered;
  for (const auto& c : r.next.clusters) {
    CHECK(std::is_sorted(c.members.begin(), c.members.end()));
    CHECK(std::binary_search(c.members.begin(), c.members.end(), c.center));
    for (Vertex v : c.members) CHECK(covered.insert(v).second);
  }
  std::set<Vertex> unclustered;
  for (std::size_t i : r.unclustered) unclustered.insert(base.clusters[i].center);
  for (Vertex v : unclustered) CHECK(covered.count(v) == 0);
  for (const auto& e : r.edges) CHECK(g.has_edge(e.u, e.v));
  CHECK(r.edges.size() + r.next.clusters.size() == covered.size());
}

TEST_CASE("superclustering without edges leaves every unsampled cluster unclustered") {
  auto s = unweighted_of(30, {});
  const auto p = spanner_schedule(30, 0.5, 4, 0.5);
  SpannerConfig cfg;
  const auto base = ClusterPartition::singletons(30);
  const auto r = superclustering_step(s, base, p, 0, cfg);
  CHECK(r.next.clusters.size() == r.sampled.size());
  CHECK(r.sampled.size() + r.unclustered.size() == 30);
  for (const auto& c : r.next.clusters) CHECK(c.members.size() == 1);
  CHECK(r.edges.empty());
}

TEST_CASE("spanner properties on random graphs") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto s = random_stream(150, 450, seed);
    const Graph g = final_graph(s);
    SpannerConfig cfg;
    cfg.seed = seed;
    const auto r = build_spanner(s, 0.5, 4, 0.5, cfg);
    CHECK(r.passes == s.passes_taken());
    CHECK(std::is_sorted(r.edges.begin(), r.edges.end(),
                         [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); }));
    PairSample ps;
    ps.seed = seed;
    const auto v = validate_spanner(g, r.edges, 0.5, r.params.beta, ps);
    CHECK(v.subgraph);
    CHECK(v.ok);
    const Graph h(150, r.edges);
    for (Vertex u : {1u, 50u, 100u}) {
      const auto dg = exact_bfs(g, {u});
      const auto dh = exact_bfs(h, {u});
      for (Vertex x = 1; x <= 150; ++x) REQUIRE((dg[x] == kUnreached) == (dh[x] == kUnreached));
    }
  }
}

TEST_CASE("spanner is deterministic for a fixed seed") {
  auto a = random_stream(100, 300, 9);
  auto b = random_stream(100, 300, 9);
  SpannerConfig cfg;
  cfg.seed = 21;
  CHECK(build_spanner(a, 0.5, 4, 0.5, cfg).edges == build_spanner(b, 0.5, 4, 0.5, cfg).edges);
}

TEST_CASE("visitor budgets") {
  SpannerConfig cfg;
  CHECK(visitor_capacity(100, 0.5, cfg) == static_cast<std::size_t>(std::ceil(3 * 10 * std::log(100.0))));
  CHECK(visitor_attempts(100, 10, cfg) >= 1);
}
