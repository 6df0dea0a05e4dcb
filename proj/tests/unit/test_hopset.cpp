#include <cmath>

#include "dgs/hopset.hpp"
#include "dgs/oracle.hpp"
#include "support.hpp"

using namespace dgs;
using dgs::test::path_stream;
using dgs::test::random_stream;
using dgs::test::stream_of;

namespace {

HopsetOverrides desk_overrides() {
  HopsetOverrides o;
  o.phase_epsilon = 0.5;
  o.chi = 0.25;
  return o;
}

}  // namespace

TEST_CASE("compound keeps small terms") {
  CHECK(compound(0.5, 0.5) == doctest::Approx(1.25));
  CHECK(compound(1e-12, 1e-12) == doctest::Approx(2e-12).epsilon(1e-9));
  CHECK(compound(0, 0) == 0);
}

TEST_CASE("epsilon sequence recursion") {
  const double e2 = 0.02;
  const auto seq = epsilon_sequence(e2, 3, 7);
  REQUIRE(seq.size() == 5);
  CHECK(seq[0] == doctest::Approx((1 + e2) * (1 + e2) - 1));
  for (std::size_t i = 1; i < seq.size(); ++i) {
    CHECK(1 + seq[i] == doctest::Approx((1 + e2) * (1 + e2) * (1 + seq[i - 1])));
  }
  CHECK(epsilon_sequence(e2, 5, 4).empty());
}

TEST_CASE("hopset schedule with desk overrides") {
  const auto p = hopset_schedule(120, 0.5, 2, 0.5, 256, desk_overrides());
  CHECK(p.ell == 2);
  CHECK(p.beta == doctest::Approx(4));
  CHECK(p.k0 == 2);
  CHECK(p.k_lambda == 7);
  CHECK(p.hops == 9);
  CHECK(p.eps2 == doctest::Approx(0.5 / 32));
  CHECK(p.eps_at(1) == 0);
  CHECK(p.eps_at(2) == doctest::Approx(p.eps_k[0]));
  CHECK(p.delta_prime(3, 0) == doctest::Approx(1.25 * (1 + p.eps_at(2)) * p.delta(3, 0)));
  CHECK(p.stretch_bound() == doctest::Approx(std::pow(1 + p.eps2, 16)));
}

TEST_CASE("the literal schedule has no scales at desk sizes") {
  const auto p = hopset_schedule(1000, 0.5, 2, 0.5, 1024);
  CHECK_FALSE(p.has_scales());
  CHECK(p.hops == 999);
  auto s = path_stream(8);
  HopsetConfig cfg;
  const auto r = multi_scale_hopset(s, 0.5, 2, 0.5, 4, cfg);
  CHECK(r.edges.empty());
}

TEST_CASE("hopset schedule rejects bad parameters") {
  CHECK_THROWS_AS(hopset_schedule(100, 0.5, 1, 0.5, 64), std::invalid_argument);
  CHECK_THROWS_AS(hopset_schedule(100, 0.5, 4, 0.1, 64), std::invalid_argument);
  CHECK_THROWS_AS(hopset_schedule(100, 0.5, 2, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(hopset_schedule(100, 0, 2, 0.5, 64), std::invalid_argument);
}

TEST_CASE("scales below k0 are empty") {
  auto s = path_stream(10);
  const auto p = hopset_schedule(10, 0.5, 2, 0.5, 64, desk_overrides());
  HopsetConfig cfg;
  CHECK(single_scale_hopset(s, p.k0 - 1, p, cfg).empty());
  CHECK(s.passes_taken() == 0);
}

TEST_CASE("floor_distance") {
  CHECK(floor_distance(2.5) == Weight::parse("2.5"));
  CHECK(floor_distance(1.0000004).ticks() == 1'000'000);
}

TEST_CASE("expand_chain joins stream hops and overlay paths") {
  const std::vector<HopsetEdge> lower{{1, 4, Weight::from_int(3), 2, {1, 2, 3, 4}}};
  DistanceEstimates::Chain c;
  c.vertices = {5, 4, 1};
  c.via = {-1, 0};
  CHECK(expand_chain(c, lower) == std::vector<Vertex>{5, 4, 3, 2, 1});
}

TEST_CASE("hopset edges respect distances and carry their paths") {
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    auto s = random_stream(40, 90, seed, 4);
    const Graph g = final_graph(s);
    HopsetConfig cfg;
    cfg.seed = seed;
    const auto r = multi_scale_hopset(s, 0.5, 2, 0.5, 256, cfg, desk_overrides());
    CHECK(r.passes == s.passes_taken());
    CHECK_FALSE(r.edges.empty());
    for (const auto& e : r.edges) {
      const Distance d = dijkstra(g, e.u).dist[e.v];
      REQUIRE(e.w >= d);
      const double bound = (1 + r.params.chi) * (1 + r.params.eps_at(e.scale - 1));
      CHECK(static_cast<double>(e.w.ticks()) <= bound * static_cast<double>(d.ticks()) + 1);
      const auto pw = path_weight(g, e.path);
      REQUIRE(pw.has_value());
      CHECK(*pw == e.w);
      CHECK(e.path.front() == e.u);
      CHECK(e.path.back() == e.v);
    }
    HopsetCheck check;
    check.eps = 0.5;
    check.hopbound = static_cast<std::size_t>(r.params.hops);
    check.all_pairs = true;
    check.check_preservation = true;
    const auto v = validate_hopset(g, r.edges, check);
    CHECK(v.ok);
    CHECK(v.lower_violations == 0);
    CHECK(v.upper_violations == 0);
    CHECK(v.undercut_edges == 0);
    CHECK(v.path_violations == 0);
    REQUIRE(v.distances_preserved.has_value());
    CHECK(*v.distances_preserved);
  }
}

TEST_CASE("unit-weight path graph") {
  auto s = path_stream(24);
  const Graph g = final_graph(s);
  HopsetConfig cfg;
  cfg.seed = 4;
  const auto r = multi_scale_hopset(s, 0.5, 2, 0.5, 32, cfg, desk_overrides());
  for (const auto& e : r.edges) {
    CHECK(e.w >= Weight::from_int(static_cast<std::int64_t>(e.v > e.u ? e.v - e.u : e.u - e.v)));
  }
  HopsetCheck check;
  check.hopbound = static_cast<std::size_t>(r.params.hops);
  check.all_pairs = true;
  CHECK(validate_hopset(g, r.edges, check).ok);
}
