#include "dgs/explore.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "dgs/hashing.hpp"
#include "dgs/random.hpp"
#include "dgs/samplers.hpp"
#include "sweep.hpp"

namespace dgs {

using detail::key_a;
using detail::key_b;
using detail::key_c;
using detail::pack_key;

std::size_t repetitions(Vertex n, double c1) {
  const double r = c1 * std::log(static_cast<double>(std::max<Vertex>(n, 2))) / std::log(8.0 / 7.0);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(r)));
}

// ---------------------------------------------------------------- BFS

std::vector<Edge> BfsForest::edges() const {
  std::vector<Edge> out;
  for (Vertex v = 1; v < parent.size(); ++v) {
    if (parent[v] != kNoVertex) out.push_back({std::min(v, parent[v]), std::max(v, parent[v])});
  }
  return out;
}

std::vector<Vertex> BfsForest::path_to_root(Vertex v) const {
  std::vector<Vertex> path;
  if (!reached(v)) return path;
  for (Vertex x = v; x != kNoVertex; x = parent[x]) path.push_back(x);
  return path;
}

std::vector<BfsForest> bfs_forests(PassSource& stream, const std::vector<std::vector<Vertex>>& roots,
                                   const BfsOptions& options, ExploreStats* stats) {
  const Vertex n = stream.vertex_count();
  const std::size_t count = roots.size();
  std::vector<BfsForest> forests(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& f = forests[i];
    f.parent.assign(n + 1, kNoVertex);
    f.root.assign(n + 1, kNoVertex);
    f.layer.assign(n + 1, -1);
    for (Vertex r : roots[i]) {
      if (r < 1 || r > n) throw std::invalid_argument("BFS root outside [1, n]");
      if (f.layer[r] == 0) continue;
      f.layer[r] = 0;
      f.root[r] = r;
    }
  }
  if (n < 2) return forests;
  const std::size_t attempts = repetitions(n, options.c1);
  const int lambda = ceil_log2(n);
  const std::size_t bank_bytes = attempts * (static_cast<std::size_t>(lambda) + 1) * sizeof(XorSlot);

  for (int p = 1; p <= options.depth; ++p) {
    const auto in_frontier = [&](std::size_t i, Vertex y) { return forests[i].layer[y] == p - 1; };

    for (int retry = 0;; ++retry) {
      const auto hashes = sample_family(attempts, n, lambda, derive_seed(options.seed, {0x626673ULL, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(retry)}));
      LevelTable table(hashes);
      for (std::size_t i = 0; i < count; ++i) {
        for (Vertex y = 1; y <= n; ++y) {
          if (in_frontier(i, y)) table.prepare(y);
        }
      }
      std::vector<std::pair<std::uint64_t, ParentOutcome>> outcomes;
      bool failed = false;
      stream.run_pass([&](std::span<const EdgeUpdate> pass) {
        auto enumerate = [&](const EdgeUpdate& e, auto&& emit) {
          for (std::size_t i = 0; i < count; ++i) {
            if (forests[i].layer[e.u] < 0 && in_frontier(i, e.v)) emit(pack_key(i, e.u, 0), e.v);
            if (forests[i].layer[e.v] < 0 && in_frontier(i, e.u)) emit(pack_key(i, e.v, 0), e.u);
          }
        };
        detail::sweep_banks<ParentSampler>(
            pass, stream.ledger(), "explore.bfs", bank_bytes, enumerate,
            [&](std::uint64_t) { return ParentSampler(table); },
            [&](ParentSampler& bank, Vertex y, int sign) { bank.add(y, sign); },
            [&](std::uint64_t key, const ParentSampler& bank) {
              const std::size_t i = key_a(key);
              const auto r = bank.first_success([&](Vertex y) { return y >= 1 && y <= n && in_frontier(i, y); });
              if (r.kind == Outcome::Failed) failed = true;
              if (r.kind == Outcome::Found) outcomes.emplace_back(key, r);
            });
      });
      if (stats) ++stats->passes;
      if (failed) {
        if (retry >= 1) throw ConstructionAborted("FindParent failed in every invocation after a seed retry");
        if (stats) ++stats->retries;
        continue;
      }
      for (const auto& [key, r] : outcomes) {
        auto& f = forests[key_a(key)];
        const Vertex v = key_b(key);
        f.parent[v] = r.parent;
        f.root[v] = f.root[r.parent];
        f.layer[v] = p;
      }
      break;
    }
  }
  return forests;
}

BfsForest bfs_forest(PassSource& stream, const std::vector<Vertex>& roots, const BfsOptions& options,
                     ExploreStats* stats) {
  return std::move(bfs_forests(stream, {roots}, options, stats).front());
}

// ---------------------------------------------------------------- estimates

DistanceEstimates::DistanceEstimates(Vertex n, const std::vector<Vertex>& sources) : history_(n + 1) {
  for (Vertex s : sources) {
    if (s < 1 || s > n) throw std::invalid_argument("source outside [1, n]");
    if (history_[s].empty()) history_[s].push_back({0, Distance::zero(), kNoVertex, -1});
  }
}

void DistanceEstimates::record(Vertex v, const EstimateEntry& entry) {
  auto& h = history_[v];
  if (!h.empty() && (entry.time <= h.back().time || !(entry.dist < h.back().dist))) {
    throw std::logic_error("estimates must strictly improve over time");
  }
  h.push_back(entry);
}

DistanceEstimates::Chain DistanceEstimates::chain(Vertex v) const {
  Chain c;
  if (history_[v].empty()) return c;
  int limit = INT_MAX;
  Vertex x = v;
  for (;;) {
    c.vertices.push_back(x);
    const auto& h = history_[x];
    auto it = std::upper_bound(h.begin(), h.end(), limit,
                               [](int t, const EstimateEntry& e) { return t < e.time; });
    if (it == h.begin()) throw std::logic_error("broken parent chain");
    const EstimateEntry& e = *std::prev(it);
    if (e.time == 0) break;
    c.via.push_back(e.via);
    x = e.parent;
    limit = e.time - 1;
  }
  return c;
}

Vertex DistanceEstimates::source_of(Vertex v) const {
  const auto c = chain(v);
  return c.vertices.empty() ? kNoVertex : c.vertices.back();
}

// ---------------------------------------------------------------- Bellman-Ford

namespace {

struct DistItem {
  std::uint64_t key;
  Vertex y;
  Distance value;
};

}  // namespace

std::vector<DistanceEstimates> approx_bellman_ford(PassSource& stream, const std::vector<std::vector<Vertex>>& sources,
                                                   const BellmanFordOptions& o, ExploreStats* stats) {
  const Vertex n = stream.vertex_count();
  const std::size_t count = sources.size();
  std::vector<DistanceEstimates> est;
  est.reserve(count);
  for (const auto& s : sources) est.emplace_back(n, s);
  if (n < 2 || o.hops < 1) return est;
  if (!(o.zeta > 0)) throw std::invalid_argument("zeta must be positive");

  const double zeta_prime = o.zeta / (2.0 * o.hops);
  const RangeLadder ladder(o.low, o.high, zeta_prime);
  const std::size_t attempts = repetitions(n, o.c1);
  const std::uint64_t domain = o.key_by_origin ? static_cast<std::uint64_t>(n) * n : n;
  const int lambda = ceil_log2(domain);
  const std::size_t bank_bytes = attempts * (static_cast<std::size_t>(lambda) + 1) * sizeof(DistSlot);

  auto edge_key = [&](const EdgeUpdate& e, Vertex neighbour) -> std::uint64_t {
    if (!o.key_by_origin) return neighbour;
    return e.origin != 0 ? e.origin : pair_index(e.u, e.v, n);
  };

  for (int p = 1; p <= o.hops; ++p) {
    std::vector<std::vector<Distance>> frozen(count, std::vector<Distance>(n + 1));
    for (std::size_t i = 0; i < count; ++i) {
      for (Vertex v = 1; v <= n; ++v) frozen[i][v] = est[i].dist(v);
    }

    for (int retry = 0;; ++retry) {
      const auto hashes = sample_family(attempts, domain, lambda, derive_seed(o.seed, {0x6266ULL, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(retry)}));
      LevelTable table(hashes);
      if (!o.key_by_origin) {
        for (Vertex u = 1; u <= n; ++u) {
          for (std::size_t i = 0; i < count; ++i) {
            if (frozen[i][u].is_finite()) {
              table.prepare(u);
              break;
            }
          }
        }
      }
      // Per (instance, vertex): the first non-empty sub-range decides.
      struct Decision {
        std::uint64_t iv = ~0ULL;
        bool decided = false;
      } cursor;
      std::vector<std::pair<std::uint64_t, DistanceOutcome>> accepted;
      bool failed = false;

      stream.run_pass([&](std::span<const EdgeUpdate> pass) {
        auto enumerate = [&](const EdgeUpdate& e, auto&& emit) {
          for (std::size_t i = 0; i < count; ++i) {
            for (int dir = 0; dir < 2; ++dir) {
              const Vertex v = dir == 0 ? e.u : e.v;
              const Vertex u = dir == 0 ? e.v : e.u;
              if (frozen[i][u].is_infinite() || est[i].is_source(v)) continue;
              const Distance value = frozen[i][u] + e.weight;
              const int j = ladder.index_of(value);
              if (j < 0) continue;
              const std::uint64_t k = edge_key(e, u);
              if (o.key_by_origin) table.prepare(k);
              emit(pack_key(i, v, static_cast<std::uint64_t>(j)), DistItem{k, u, value});
            }
          }
        };
        detail::sweep_banks<DistanceSampler>(
            pass, stream.ledger(), "explore.bellman_ford", bank_bytes, enumerate,
            [&](std::uint64_t) { return DistanceSampler(hashes, &table); },
            [&](DistanceSampler& bank, const DistItem& item, int sign) { bank.add(item.key, item.y, item.value, sign); },
            [&](std::uint64_t key, const DistanceSampler& bank) {
              const std::uint64_t iv = key >> 24;
              if (iv != cursor.iv) cursor = {iv, false};
              if (cursor.decided) return;
              const std::size_t i = key_a(key);
              const Vertex v = key_b(key);
              const auto range = ladder.range(key_c(key));
              const auto r = bank.best([&](Vertex y, Distance d) {
                return y >= 1 && y <= n && frozen[i][y].is_finite() && range.contains(d) && frozen[i][y] < d;
              });
              if (r.kind == Outcome::Empty) return;
              cursor.decided = true;
              if (r.kind == Outcome::Found) {
                if (r.dist < frozen[i][v]) accepted.emplace_back(key, r);
                return;
              }
              // A failed sub-range only matters if it may hold an improvement.
              const int current = ladder.index_of(frozen[i][v]);
              if (frozen[i][v].is_infinite() || current < 0 || static_cast<int>(key_c(key)) <= current) failed = true;
            });
      });
      if (stats) ++stats->passes;
      if (failed) {
        if (retry >= 1) throw ConstructionAborted("GuessDistance failed in every invocation after a seed retry");
        if (stats) ++stats->retries;
        continue;
      }
      for (const auto& [key, r] : accepted) {
        est[key_a(key)].record(key_b(key), {2 * p - 1, r.dist, r.parent, -1});
      }
      break;
    }

    if (!o.overlay.empty()) {
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<Distance> snap(n + 1);
        for (Vertex v = 1; v <= n; ++v) snap[v] = est[i].dist(v);
        std::vector<EstimateEntry> best(n + 1);
        for (std::size_t idx = 0; idx < o.overlay.size(); ++idx) {
          const auto& h = o.overlay[idx];
          for (int dir = 0; dir < 2; ++dir) {
            const Vertex a = dir == 0 ? h.u : h.v;
            const Vertex b = dir == 0 ? h.v : h.u;
            if (snap[a].is_infinite() || est[i].is_source(b)) continue;
            const Distance d = snap[a] + h.w;
            if (d < snap[b] && d < best[b].dist) best[b] = {2 * p, d, a, static_cast<std::int64_t>(idx)};
          }
        }
        for (Vertex v = 1; v <= n; ++v) {
          if (best[v].dist.is_finite()) est[i].record(v, best[v]);
        }
      }
    }
  }
  return est;
}

}  // namespace dgs
