#include <cmath>
#include <numeric>

#include "dgs/aspect.hpp"
#include "dgs/oracle.hpp"
#include "support.hpp"

using namespace dgs;
using dgs::test::stream_of;

namespace {

struct UnionFind {
  std::vector<Vertex> p;
  explicit UnionFind(Vertex n) : p(n + 1) { std::iota(p.begin(), p.end(), 0); }
  Vertex find(Vertex x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void join(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a != b) p[std::max(a, b)] = std::min(a, b);
  }
};

MultipassStream log_uniform_stream(Vertex n, std::size_t m, std::uint64_t seed, std::int64_t max_weight) {
  GeneratorOptions o;
  o.n = n;
  o.target_edges = m;
  o.seed = seed;
  o.weighted = true;
  o.max_weight = Weight::from_int(max_weight);
  o.distribution = WeightDistribution::LogUniform;
  return generate_stream(o);
}

}  // namespace

TEST_CASE("weights of stars and node edges") {
  CHECK(star_weight(0.5, 8, 4, 3) == Weight::from_int(3));
  CHECK(star_weight(0.5, 8, 4, 1) == Weight::from_int(1));
  CHECK(node_edge_weight(Weight::from_int(5), 0.5, 8, 4, 1, 2) == Weight::from_int(8));
  CHECK(light_threshold(0.5, 8, 4) == doctest::Approx(1.0));
}

TEST_CASE("weight classes") {
  CHECK(weight_class(Weight::from_int(1), 0.5, 8, 0, 10) == 4);
  CHECK(weight_class(Weight::parse("1.5"), 0.5, 8, 0, 10) == 5);
  CHECK(weight_class(Weight::from_int(1), 0.5, 8, 5, 10) == 5);
  CHECK(weight_class(Weight::from_int(1000), 0.5, 8, 0, 10) == -1);
}

TEST_CASE("relevant window matches a direct scan") {
  const Vertex n = 16;
  for (std::int64_t w = 1; w <= 300; w += 7) {
    for (int k = 0; k <= 12; ++k) {
      const double x = static_cast<double>(w);
      const bool direct = x > std::ldexp(1.0, k) / n && x <= std::ldexp(1.0, k + 1);
      CHECK(in_relevant_window(Weight::from_int(w), n, k) == direct);
    }
  }
}

TEST_CASE("equal weights give one node per scale") {
  std::vector<std::tuple<Vertex, Vertex, std::int64_t>> edges;
  for (Vertex v = 1; v < 12; ++v) edges.emplace_back(v, v + 1, 1);
  auto s = stream_of(12, edges);
  const double eps = 0.5;
  NodeOptions o;
  o.seed = 3;
  const auto h = compute_nodes(s, eps, 0, 10, o);
  CHECK(s.passes_taken() == 1);
  for (int k = 0; k <= 10; ++k) {
    const auto& sc = h.scale(k);
    const bool light = 1.0 <= light_threshold(eps, 12, k);
    CHECK(sc.centers.size() == (light ? 1u : 12u));
    if (light) {
      for (Vertex v = 1; v <= 12; ++v) CHECK(sc.size[v] == 12);
    }
  }
}

TEST_CASE("components agree with union-find on every scale") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Vertex n = 120;
    auto s = log_uniform_stream(n, 360, seed, 1 << 16);
    const Graph g = final_graph(s);
    const double eps = 0.5 / 24;
    NodeOptions o;
    o.seed = seed;
    const auto h = compute_nodes(s, eps, 2, 25, o);
    std::size_t star_count = 0;
    for (int k = 2; k <= 25; ++k) {
      UnionFind uf(n);
      for (const auto& e : g.edges()) {
        if (e.w <= floor_distance(light_threshold(eps, n, k))) uf.join(e.u, e.v);
      }
      const auto& sc = h.scale(k);
      for (Vertex a = 1; a <= n; ++a) {
        REQUIRE(sc.center[sc.center[a]] == sc.center[a]);
        for (Vertex b = a + 1; b <= n; ++b) REQUIRE((uf.find(a) == uf.find(b)) == (sc.center[a] == sc.center[b]));
      }
      NodeGraphStream ng(s, h, k);
      for (const auto& e : s.updates()) {
        const auto t = ng.translate(e);
        if (!t) continue;
        CHECK(t->u == sc.center[e.u]);
        CHECK(t->v == sc.center[e.v]);
        CHECK(t->weight == node_edge_weight(e.weight, eps, n, k, sc.size[e.u], sc.size[e.v]));
        CHECK(t->weight.to_double() > eps / n * std::ldexp(1.0, k + 1));
        CHECK(t->weight <= Weight::ceil_of((1 + eps / 2) * std::ldexp(1.0, k + 1)));
      }
    }
    for (const auto& list : h.lists) star_count += list.size();
    CHECK(h.star_edges.size() <= star_count);
    CHECK(static_cast<double>(h.star_edges.size()) <= n * std::log2(static_cast<double>(n)));
    for (const auto& e : h.star_edges) {
      CHECK(e.w >= dijkstra(g, e.u).dist[e.v]);
    }
  }
}

TEST_CASE("reduced hopset preserves distances") {
  auto s = log_uniform_stream(40, 100, 5, 8);
  const Graph g = final_graph(s);
  HopsetConfig cfg;
  HopsetOverrides ov;
  ov.phase_epsilon = 0.5;
  ov.chi = 0.25;
  const auto r = aspect_ratio_reduce(s, 0.5, 2, 0.5, 256, cfg, ov);
  CHECK(r.hopset.passes == s.passes_taken());
  HopsetCheck check;
  check.hopbound = static_cast<std::size_t>(r.hopset.params.hops);
  check.all_pairs = true;
  check.check_paths = false;
  check.check_preservation = true;
  const auto v = validate_hopset(g, r.hopset.edges, check);
  CHECK(v.ok);
  CHECK(v.undercut_edges == 0);
  REQUIRE(v.distances_preserved.has_value());
  CHECK(*v.distances_preserved);
}
