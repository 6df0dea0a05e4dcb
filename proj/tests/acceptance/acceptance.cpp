// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Usage: dgs_acceptance [criterion ...]; no arguments runs all of them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dgs/aspect.hpp"
#include "dgs/encoding.hpp"
#include "dgs/explore.hpp"
#include "dgs/hashing.hpp"
#include "dgs/hopset.hpp"
#include "dgs/oracle.hpp"
#include "dgs/paths.hpp"
#include "dgs/random.hpp"
#include "dgs/spanner.hpp"
#include "dgs/stream.hpp"

using namespace dgs;

namespace {

// Pinned tolerances.
constexpr double kL0Delta = 0.05;
constexpr double kL0MaxFailure = 0.05;
constexpr double kL0MaxTv = 0.05;
constexpr double kIsolationTarget = 1.0 / 8;
constexpr double kIsolationSigmas = 3;
constexpr int kBfsMinGood = 99;
constexpr int kBfLowerMin = 50;
constexpr int kBfUpperMin = 49;
constexpr double kSpannerPassFactor = 10;
constexpr double kHopsetEps = 0.5;
constexpr double kAspectBound = 256;
constexpr double kAspEps = 0.5;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

MultipassStream graph(Vertex n, std::size_t m, std::uint64_t seed, std::int64_t max_weight = 0,
                      WeightDistribution dist = WeightDistribution::Uniform) {
  GeneratorOptions o;
  o.n = n;
  o.target_edges = m;
  o.churn = 1;
  o.seed = seed;
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

// Largest finite distance over the smallest edge weight.
double aspect_ratio(const Graph& g) {
  Weight lightest = Weight::infinity();
  for (const auto& e : g.edges()) lightest = std::min(lightest, e.w);
  double far = 0;
  for (Vertex s = 1; s <= g.n(); ++s) {
    for (const Distance& d : dijkstra(g, s).dist) {
      if (d.is_finite()) far = std::max(far, d.to_double());
    }
  }
  return lightest.is_finite() ? far / lightest.to_double() : 1;
}

// ------------------------------------------------------------ criterion 1

Verdict one_sparse_exhaustive() {
  std::size_t cases = 0, errors = 0;
  Rng rng(1);
  for (std::uint32_t n = 1; n <= 8; ++n) {
    const auto cb = CisCodebook::build(n);
    std::vector<std::vector<std::uint32_t>> supports{{}};
    for (std::uint32_t a = 1; a <= n; ++a) {
      supports.push_back({a});
      for (std::uint32_t b = a + 1; b <= n; ++b) {
        supports.push_back({a, b});
        for (std::uint32_t c = b + 1; c <= n; ++c) supports.push_back({a, b, c});
      }
    }
    for (const auto& support : supports) {
      const std::size_t combos = static_cast<std::size_t>(std::pow(3, support.size()));
      for (std::size_t code = 0; code < combos; ++code) {
        std::vector<std::int64_t> values;
        for (std::size_t i = 0, c = code; i < support.size(); ++i, c /= 3) values.push_back(1 + c % 3);
        for (int order = 0; order < 6; ++order) {
          std::vector<CoordinateUpdate> ups;
          for (std::size_t i = 0; i < support.size(); ++i) {
            // Split into unit increments, then cancel an extra copy.
            for (std::int64_t k = 0; k < values[i]; ++k) ups.push_back({support[i], +1});
            if (order % 2 == 1) {
              ups.push_back({support[i], +2});
              ups.push_back({support[i], -2});
            }
          }
          const auto noise = static_cast<std::uint32_t>(rng.between(1, n));
          ups.push_back({noise, +3});
          ups.push_back({noise, -3});
          rng.shuffle(ups.begin(), ups.end());
          OneSparseSketch whole, left, right;
          for (std::size_t i = 0; i < ups.size(); ++i) {
            whole.update(cb, ups[i].index, ups[i].delta);
            (i % 2 == 0 ? left : right).update(cb, ups[i].index, ups[i].delta);
          }
          left.merge(right);
          ++cases;
          if (!(left == whole)) {
            ++errors;
            continue;
          }
          const auto r = one_sparse_recover(whole, cb);
          bool ok = false;
          if (support.empty()) ok = r.kind == OneSparseResult::Kind::Empty;
          if (support.size() == 1) {
            ok = r.kind == OneSparseResult::Kind::One && r.index == support[0] && r.value == values[0];
          }
          if (support.size() >= 2) ok = r.kind == OneSparseResult::Kind::Dense;
          errors += ok ? 0 : 1;
        }
      }
    }
  }
  return {errors == 0, format("%zu cases, %zu errors", cases, errors)};
}

// ------------------------------------------------------------ criterion 2

Verdict l0_sampler_uniformity() {
  const std::uint32_t n = 1024;
  const auto cb = codebook_for(n);
  Rng rng(2);
  std::map<std::uint32_t, std::int64_t> vec;
  while (vec.size() < 16) vec[static_cast<std::uint32_t>(rng.between(1, n))] = static_cast<std::int64_t>(rng.between(1, 3));
  std::vector<CoordinateUpdate> ups;
  for (const auto& [i, v] : vec) ups.push_back({i, v});
  for (int k = 0; k < 32; ++k) {
    const auto i = static_cast<std::uint32_t>(rng.between(1, n));
    ups.push_back({i, +1});
    ups.push_back({i, -1});
  }
  rng.shuffle(ups.begin(), ups.end());
  const std::size_t draws = 10'000;
  std::size_t failures = 0, wrong = 0, found = 0;
  std::map<std::uint32_t, std::size_t> hits;
  for (std::size_t t = 0; t < draws; ++t) {
    const auto r = l0_sample(ups, kL0Delta, cb, derive_seed(77, {t}));
    if (r.kind != L0Result::Kind::Found) {
      ++failures;
      continue;
    }
    auto it = vec.find(r.index);
    if (it == vec.end() || it->second != r.value) {
      ++wrong;
      continue;
    }
    ++hits[r.index];
    ++found;
  }
  double tv = 0;
  for (const auto& [i, v] : vec) tv += std::abs(static_cast<double>(hits[i]) / static_cast<double>(found) - 1.0 / 16);
  tv /= 2;
  const double failure = static_cast<double>(failures) / draws;
  return {wrong == 0 && failure <= kL0MaxFailure && tv <= kL0MaxTv,
          format("failure rate %.4f (<= %.2f), wrong %zu, TV %.4f (<= %.2f)", failure, kL0MaxFailure, wrong, tv,
                 kL0MaxTv)};
}

// ------------------------------------------------------------ criterion 3

Verdict hash_isolation() {
  const std::uint64_t n = 1 << 16;
  const int lambda = ceil_log2(n);
  const std::size_t trials = 100'000;
  const double sigma = std::sqrt(kIsolationTarget * (1 - kIsolationTarget) / trials);
  const double floor = kIsolationTarget - kIsolationSigmas * sigma;
  Rng rng(3);
  bool pass = true;
  std::string detail;
  double worst = 1;
  for (std::uint64_t s = 2; s <= 256; s *= 2) {
    const int k = lambda - ceil_log2(s) - 1;
    const std::uint64_t bound = std::uint64_t{1} << k;
    std::size_t hits = 0;
    std::set<std::uint64_t> members;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto h = PairwiseHash::sample(n, lambda, rng.next());
      members.clear();
      while (members.size() < s) members.insert(rng.between(1, n));
      std::size_t inside = 0;
      for (auto x : members) inside += h(x) <= bound;
      hits += inside == 1;
    }
    const double rate = static_cast<double>(hits) / trials;
    worst = std::min(worst, rate);
    pass = pass && rate >= floor;
    detail += format("s=%llu:%.3f ", static_cast<unsigned long long>(s), rate);
  }
  return {pass, detail + format("(min %.4f >= %.4f)", worst, floor)};
}

// ------------------------------------------------------------ criterion 4

Verdict bfs_forests_exact() {
  const int eta = 5;
  int good = 0, exact_passes = 0;
  for (int g = 0; g < 100; ++g) {
    auto s = graph(200, 600, 4000 + g);
    const Graph G = final_graph(s);
    BfsOptions o;
    o.depth = eta;
    o.c1 = 3;
    o.seed = static_cast<std::uint64_t>(g);
    const auto f = bfs_forest(s, {1}, o);
    exact_passes += s.passes_taken() == static_cast<std::size_t>(eta) ? 1 : 0;
    const auto d = exact_bfs(G, {1});
    bool ok = true;
    for (Vertex v = 1; v <= G.n() && ok; ++v) {
      const bool in_range = d[v] != kUnreached && d[v] <= eta;
      ok = f.reached(v) == in_range && (!in_range || f.layer[v] == d[v]);
      if (ok && in_range && d[v] > 0) ok = G.has_edge(v, f.parent[v]) && f.layer[f.parent[v]] == d[v] - 1;
    }
    good += ok ? 1 : 0;
  }
  return {good >= kBfsMinGood && exact_passes == 100,
          format("%d/100 exact (>= %d), %d/100 with exactly %d passes", good, kBfsMinGood, exact_passes, eta)};
}

// ------------------------------------------------------------ criterion 5

Verdict approx_bellman_ford_bounds() {
  const int eta = 6;
  const double zeta = 0.25;
  int lower_ok = 0, upper_ok = 0, pointer_ok = 0;
  for (int g = 0; g < 50; ++g) {
    auto s = graph(100, 300, 5000 + g, 32);
    const Graph G = final_graph(s);
    BellmanFordOptions o;
    o.hops = eta;
    o.zeta = zeta;
    o.low = Weight::from_int(1);
    o.high = Weight::from_int(32 * 99);
    o.seed = static_cast<std::uint64_t>(g);
    const auto est = approx_bellman_ford(s, {{1}}, o)[0];
    const auto bounded = hop_bounded_bf(G, 1, eta);
    bool lower = true, upper = true, pointer = true;
    for (Vertex v = 1; v <= G.n(); ++v) {
      const Distance d = est.dist(v);
      if (bounded[v].is_infinite()) {
        lower = lower && d.is_infinite();
        continue;
      }
      if (d.is_infinite()) {
        upper = false;
        continue;
      }
      lower = lower && d >= bounded[v];
      upper = upper && d.to_double() <= (1 + zeta) * bounded[v].to_double() + 1e-6;
      const auto chain = est.chain(v);
      std::vector<Vertex> path(chain.vertices.rbegin(), chain.vertices.rend());
      const auto w = path_weight(G, path);
      pointer = pointer && path.front() == 1 && w.has_value() && *w == d;
    }
    lower_ok += lower;
    upper_ok += upper;
    pointer_ok += pointer;
  }
  return {lower_ok >= kBfLowerMin && upper_ok >= kBfUpperMin && pointer_ok == 50,
          format("lower %d/50 (>= %d), upper %d/50 (>= %d), pointer paths %d/50", lower_ok, kBfLowerMin, upper_ok,
                 kBfUpperMin, pointer_ok)};
}

// ------------------------------------------------------------ criterion 6

Verdict spanner_stretch() {
  std::size_t violations = 0, worst_passes = 0, total_h = 0, total_m = 0, pairs = 0;
  bool subgraph = true;
  double beta = 0;
  for (int g = 0; g < 20; ++g) {
    auto s = graph(400, 1200, 6000 + g);
    const Graph G = final_graph(s);
    SpannerConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(g);
    const auto r = build_spanner(s, 0.5, 4, 0.5, cfg);
    beta = r.params.beta;
    PairSample ps;
    ps.uniform_pairs = 500;
    ps.seed = static_cast<std::uint64_t>(g);
    const auto v = validate_spanner(G, r.edges, 0.5, r.params.beta, ps);
    violations += v.violations;
    subgraph = subgraph && v.subgraph;
    pairs += v.pairs;
    worst_passes = std::max(worst_passes, s.passes_taken());
    total_h += r.edges.size();
    total_m += G.edge_count();
  }
  const double pass_limit = kSpannerPassFactor * beta;
  return {violations == 0 && subgraph && static_cast<double>(worst_passes) <= pass_limit,
          format("beta %.0f, %zu pairs, %zu violations, mean |H| %.1f of m %.1f, max passes %zu (<= %.0f)", beta, pairs,
                 violations, total_h / 20.0, total_m / 20.0, worst_passes, pass_limit)};
}

// ------------------------------------------------------------ criterion 7

Verdict hopset_sandwich() {
  std::size_t lower = 0, upper = 0, undercut = 0, path_bad = 0, paths = 0, not_preserved = 0, too_wide = 0;
  double worst = 1, widest = 0;
  std::size_t passes = 0, size = 0;
  auto check_graph = [&](const Graph& G, const HopsetResult& r, bool with_paths) {
    HopsetCheck c;
    c.eps = kHopsetEps;
    c.hopbound = static_cast<std::size_t>(r.params.hops);
    c.all_pairs = true;
    c.check_paths = with_paths;
    c.check_preservation = true;
    const auto v = validate_hopset(G, r.edges, c);
    lower += v.lower_violations;
    upper += v.upper_violations;
    undercut += v.undercut_edges;
    path_bad += v.path_violations;
    paths += v.paths_checked;
    not_preserved += v.distances_preserved.value_or(false) ? 0 : 1;
    worst = std::max(worst, v.worst_stretch);
    if (with_paths) {
      for (const auto& e : r.edges) path_bad += e.path.empty() ? 1 : 0;
    }
    passes = std::max(passes, r.passes);
    size = std::max(size, r.edges.size());
  };
  for (int g = 0; g < 10; ++g) {
    auto s = graph(120, 360, 7000 + g, 8);
    const Graph G = final_graph(s);
    const double lambda = aspect_ratio(G);
    widest = std::max(widest, lambda);
    too_wide += lambda > kAspectBound ? 1 : 0;
    HopsetConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(g);
    cfg.path_reporting = true;
    check_graph(G, multi_scale_hopset(s, kHopsetEps, 2, 0.5, kAspectBound, cfg, desk_overrides()), true);
    if (g < 3) {
      auto fresh = s.replay();
      check_graph(G, aspect_ratio_reduce(fresh, kHopsetEps, 2, 0.5, kAspectBound, cfg, desk_overrides()).hopset,
                  false);
    }
  }
  const bool pass = lower == 0 && upper == 0 && undercut == 0 && path_bad == 0 && not_preserved == 0 && too_wide == 0;
  return {pass, format("10 direct + 3 reduced builds: lower %zu, upper %zu, worst stretch %.3f, undercut %zu, "
                       "preservation failures %zu, paths %zu with %zu mismatches, max aspect %.0f (<= %.0f), "
                       "max |H| %zu, max passes %zu",
                       lower, upper, worst, undercut, not_preserved, paths, path_bad, widest, kAspectBound, size,
                       passes)};
}

// ------------------------------------------------------------ criterion 8

struct UnionFind {
  std::vector<Vertex> p;
  explicit UnionFind(Vertex n) : p(n + 1) {
    for (Vertex i = 0; i <= n; ++i) p[i] = i;
  }
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

Verdict aspect_reduction_nodes() {
  const Vertex n = 200;
  const double eps = 0.5 / 24;
  const int k_first = 2, k_last = 29;
  std::size_t component_errors = 0, weight_errors = 0, translated = 0, star_overflow = 0, max_stars = 0;
  const double star_bound = n * std::log2(static_cast<double>(n));
  for (int g = 0; g < 20; ++g) {
    auto s = graph(n, 600, 8000 + g, 1 << 20, WeightDistribution::LogUniform);
    const Graph G = final_graph(s);
    NodeOptions o;
    o.seed = static_cast<std::uint64_t>(g);
    const auto h = compute_nodes(s, eps, k_first, k_last, o);
    for (int k = k_first; k <= k_last; ++k) {
      UnionFind uf(n);
      for (const auto& e : G.edges()) {
        if (e.w <= floor_distance(light_threshold(eps, n, k))) uf.join(e.u, e.v);
      }
      const auto& sc = h.scale(k);
      for (Vertex a = 1; a <= n; ++a) {
        for (Vertex b = a + 1; b <= n; ++b) {
          component_errors += (uf.find(a) == uf.find(b)) != (sc.center[a] == sc.center[b]) ? 1 : 0;
        }
      }
      NodeGraphStream ng(s, h, k);
      const double lo = eps / n * std::ldexp(1.0, k + 1);
      const Weight hi = Weight::ceil_of((1 + eps / 2) * std::ldexp(1.0, k + 1));
      for (const auto& e : s.updates()) {
        const auto t = ng.translate(e);
        if (!t) continue;
        ++translated;
        if (!(t->weight.to_double() > lo && t->weight <= hi)) ++weight_errors;
      }
    }
    max_stars = std::max(max_stars, h.star_edges.size());
    star_overflow += static_cast<double>(h.star_edges.size()) > star_bound ? 1 : 0;
  }
  return {component_errors == 0 && weight_errors == 0 && star_overflow == 0,
          format("component mismatches %zu, node-graph weights out of range %zu of %zu, max stars %zu (<= %.0f)",
                 component_errors, weight_errors, translated, max_stars, star_bound)};
}

// ------------------------------------------------------------ criterion 9

Verdict weighted_asp() {
  std::size_t lower = 0, upper = 0, path_bad = 0, checked = 0, too_wide = 0;
  double worst = 1;
  const std::vector<Vertex> S{1, 30, 60, 90};
  for (int g = 0; g < 10; ++g) {
    auto s = graph(120, 360, 9000 + g, 8);
    const Graph G = final_graph(s);
    too_wide += aspect_ratio(G) > kAspectBound ? 1 : 0;
    HopsetConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(g);
    const auto r = multi_source_asp_weighted(s, S, kAspEps, 2, 0.5, kAspectBound, cfg, desk_overrides());
    for (std::size_t i = 0; i < S.size(); ++i) {
      const auto d = dijkstra(G, S[i]);
      for (Vertex v = 1; v <= G.n(); ++v) {
        const Distance est = r.distance(i, v);
        ++checked;
        if (d.dist[v].is_infinite()) {
          lower += est.is_finite() ? 1 : 0;
          continue;
        }
        if (est < d.dist[v]) ++lower;
        if (est.to_double() > (1 + kAspEps) * d.dist[v].to_double() + 1e-6) ++upper;
        if (d.dist[v].ticks() > 0) worst = std::max(worst, est.to_double() / d.dist[v].to_double());
        const auto p = r.path(i, v);
        const auto w = path_weight(G, p);
        if (p.empty() || p.front() != S[i] || p.back() != v || !w || *w != est) ++path_bad;
      }
    }
  }
  return {lower == 0 && upper == 0 && path_bad == 0 && too_wide == 0,
          format("%zu estimates: lower %zu, upper %zu, worst ratio %.3f, path mismatches %zu", checked, lower, upper,
                 worst, path_bad)};
}

// ------------------------------------------------------------ criterion 10

template <class Run>
bool stable(const MultipassStream& base, Run run) {
  auto a = base.replay();
  auto b = base.replay();
  auto c = base.permuted(101);
  auto d = base.permuted(202);
  const auto ra = run(a);
  return ra == run(b) && ra == run(c) && ra == run(d);
}

bool same_hopset(const std::vector<HopsetEdge>& x, const std::vector<HopsetEdge>& y) { return x == y; }

Verdict determinism() {
  std::vector<std::pair<std::string, bool>> results;
  const auto u = graph(200, 600, 10'001);
  const auto w = graph(60, 150, 10'002, 8);
  const auto wide = graph(200, 600, 10'003, 1 << 20, WeightDistribution::LogUniform);

  results.emplace_back("bfs", stable(u, [](MultipassStream& s) {
                         BfsOptions o;
                         o.depth = 5;
                         o.seed = 3;
                         const auto f = bfs_forests(s, {{1}, {2, 3}}, o);
                         std::vector<std::vector<Vertex>> out;
                         for (const auto& t : f) out.push_back(t.parent);
                         return out;
                       }));
  results.emplace_back("bellman-ford", stable(w, [](MultipassStream& s) {
                         BellmanFordOptions o;
                         o.hops = 6;
                         o.high = Weight::from_int(500);
                         o.seed = 4;
                         const auto est = approx_bellman_ford(s, {{1}}, o)[0];
                         std::vector<std::int64_t> out;
                         for (Vertex v = 1; v <= est.n(); ++v) {
                           out.push_back(est.dist(v).ticks());
                           out.push_back(est.parent(v));
                         }
                         return out;
                       }));
  results.emplace_back("spanner", stable(u, [](MultipassStream& s) {
                         SpannerConfig cfg;
                         cfg.seed = 5;
                         return build_spanner(s, 0.5, 4, 0.5, cfg).edges;
                       }));
  results.emplace_back("unweighted asp", stable(u, [](MultipassStream& s) {
                         SpannerConfig cfg;
                         cfg.seed = 6;
                         return multi_source_asp_unweighted(s, {1, 2, 3}, 0.5, 4, 0.5, cfg).dist;
                       }));
  results.emplace_back("hopset", stable(w, [](MultipassStream& s) {
                         HopsetConfig cfg;
                         cfg.seed = 7;
                         return multi_scale_hopset(s, 0.5, 2, 0.5, 256, cfg, desk_overrides()).edges;
                       }));
  results.emplace_back("reduced hopset", stable(w, [](MultipassStream& s) {
                         HopsetConfig cfg;
                         cfg.seed = 8;
                         return aspect_ratio_reduce(s, 0.5, 2, 0.5, 256, cfg, desk_overrides()).hopset.edges;
                       }));
  results.emplace_back("nodes", stable(wide, [](MultipassStream& s) {
                         NodeOptions o;
                         o.seed = 9;
                         const auto h = compute_nodes(s, 0.5 / 24, 2, 29, o);
                         std::vector<std::vector<Vertex>> out;
                         for (const auto& sc : h.scales) out.push_back(sc.center);
                         return out;
                       }));
  results.emplace_back("weighted asp", stable(w, [](MultipassStream& s) {
                         HopsetConfig cfg;
                         cfg.seed = 10;
                         const auto r = multi_source_asp_weighted(s, {1, 2}, 0.5, 2, 0.5, 256, cfg, desk_overrides());
                         std::vector<std::vector<Vertex>> out;
                         for (std::size_t i = 0; i < 2; ++i) {
                           for (Vertex v = 1; v <= 60; ++v) {
                             auto p = r.path(i, v);
                             p.push_back(static_cast<Vertex>(r.distance(i, v).ticks() % 1'000'000'007));
                             out.push_back(std::move(p));
                           }
                         }
                         return out;
                       }));
  bool pass = true;
  std::string detail;
  for (const auto& [name, ok] : results) {
    pass = pass && ok;
    detail += name + (ok ? " ok, " : " DIFFERS, ");
  }
  detail.resize(detail.size() - 2);
  return {pass, detail + " (2 reruns + 2 permuted replays each)"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "1-sparse recovery", one_sparse_exhaustive},
      {2, "l0 sampler", l0_sampler_uniformity},
      {3, "hash isolation", hash_isolation},
      {4, "bfs forests", bfs_forests_exact},
      {5, "approximate bellman-ford", approx_bellman_ford_bounds},
      {6, "spanner", spanner_stretch},
      {7, "hopset", hopset_sandwich},
      {8, "aspect reduction", aspect_reduction_nodes},
      {9, "weighted S x V distances", weighted_asp},
      {10, "determinism", determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && wanted.count(c.id) == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-26s %s  %s [%.1fs]\n", c.id, c.name, v.pass ? "PASS" : "FAIL", v.detail.c_str(), dt);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
