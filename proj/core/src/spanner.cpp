#include "dgs/spanner.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "dgs/encoding.hpp"
#include "dgs/hashing.hpp"
#include "dgs/random.hpp"
#include "dgs/samplers.hpp"
#include "sweep.hpp"

namespace dgs {

using detail::key_b;
using detail::key_c;
using detail::pack_key;

SpannerParams spanner_schedule(Vertex n, double eps, double kappa, double rho) {
  if (n < 2) throw std::invalid_argument("spanner needs n >= 2");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(kappa >= 2)) throw std::invalid_argument("kappa must be >= 2");
  if (!(rho > 0 && rho <= 0.5)) throw std::invalid_argument("rho must lie in (0, 1/2]");
  if (kappa * rho < 1 - 1e-12) throw std::invalid_argument("kappa * rho must be >= 1");
  SpannerParams p;
  p.n = n;
  p.eps = eps;
  p.kappa = kappa;
  p.rho = rho;
  const double log_kr = std::log2(kappa * rho);
  p.i0 = static_cast<int>(std::floor(log_kr + 1e-12));
  p.ell = p.i0 + static_cast<int>(std::ceil((kappa + 1) / (kappa * rho) - 1e-12)) - 1;
  const double nd = n;
  for (int i = 0; i <= p.ell; ++i) {
    p.deg.push_back(i <= p.i0 ? std::pow(nd, std::pow(2.0, i) / kappa) : std::pow(nd, rho));
  }
  double r = 0;
  for (int i = 0; i <= p.ell; ++i) {
    const double d = std::pow(1.0 / eps, i) + 4 * r;
    p.radius.push_back(r);
    p.delta.push_back(d);
    r += d;
  }
  const double exponent = log_kr + 1 / rho;
  p.beta = std::pow(exponent / eps, exponent);
  return p;
}

ClusterPartition ClusterPartition::singletons(Vertex n) {
  ClusterPartition p;
  p.clusters.reserve(n);
  for (Vertex v = 1; v <= n; ++v) p.clusters.push_back({v, {v}});
  return p;
}

std::size_t visitor_attempts(Vertex n, double deg, const SpannerConfig& config) {
  const double ln = std::log(static_cast<double>(n));
  const double visitors = config.c1_prime * deg * ln;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(16 * config.c4 * visitors * ln)));
}

std::size_t visitor_capacity(Vertex n, double rho, const SpannerConfig& config) {
  const double ln = std::log(static_cast<double>(n));
  return static_cast<std::size_t>(std::max(1.0, std::ceil(config.c1_prime * std::pow(static_cast<double>(n), rho) * ln)));
}

// ---------------------------------------------------------------- superclustering

SuperclusterResult superclustering_step(PassSource& stream, const ClusterPartition& partition,
                                        const SpannerParams& params, int phase, const SpannerConfig& config,
                                        ExploreStats* stats) {
  SuperclusterResult r;
  Rng rng(derive_seed(config.seed, {0x73616d70ULL, static_cast<std::uint64_t>(phase)}));
  const double prob = 1.0 / params.deg.at(phase);
  std::vector<std::uint8_t> is_sampled(partition.clusters.size(), 0);
  std::vector<Vertex> roots;
  for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
    if (rng.unit() < prob) {
      is_sampled[c] = 1;
      r.sampled.push_back(c);
      roots.push_back(partition.clusters[c].center);
    }
  }
  const int depth = static_cast<int>(std::floor(params.delta.at(phase) + 1e-9));
  const BfsForest forest = bfs_forest(
      stream, roots, {depth, config.c1, derive_seed(config.seed, {0x73757072ULL, static_cast<std::uint64_t>(phase)})},
      stats);

  std::unordered_map<Vertex, std::size_t> slot_of_root;
  for (std::size_t c : r.sampled) {
    slot_of_root[partition.clusters[c].center] = r.next.clusters.size();
    r.next.clusters.push_back(partition.clusters[c]);
  }
  std::set<std::uint64_t> seen;
  for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
    if (is_sampled[c]) continue;
    const Cluster& cl = partition.clusters[c];
    if (!forest.reached(cl.center)) {
      r.unclustered.push_back(c);
      continue;
    }
    auto& target = r.next.clusters[slot_of_root.at(forest.root[cl.center])];
    target.members.insert(target.members.end(), cl.members.begin(), cl.members.end());
    const auto path = forest.path_to_root(cl.center);
    for (std::size_t k = 1; k < path.size(); ++k) {
      const Vertex a = std::min(path[k - 1], path[k]);
      const Vertex b = std::max(path[k - 1], path[k]);
      if (seen.insert(edge_name(a, b)).second) r.edges.push_back({a, b});
    }
  }
  for (auto& cl : r.next.clusters) std::sort(cl.members.begin(), cl.members.end());
  return r;
}

// ---------------------------------------------------------------- interconnection

std::vector<Edge> prune_tree(const std::vector<std::pair<Vertex, Vertex>>& child_parent, Vertex root,
                             const std::vector<std::uint8_t>& keep) {
  std::unordered_map<Vertex, std::vector<std::size_t>> incident;
  for (std::size_t i = 0; i < child_parent.size(); ++i) {
    incident[child_parent[i].first].push_back(i);
    incident[child_parent[i].second].push_back(i);
  }
  std::vector<std::uint8_t> removed(child_parent.size(), 0);
  std::unordered_map<Vertex, std::size_t> degree;
  for (const auto& [v, list] : incident) degree[v] = list.size();
  std::vector<Vertex> stack;
  for (const auto& [v, d] : degree) {
    if (d == 1 && v != root && !keep[v]) stack.push_back(v);
  }
  std::sort(stack.begin(), stack.end());
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (std::size_t i : incident[v]) {
      if (removed[i]) continue;
      removed[i] = 1;
      const Vertex other = child_parent[i].first == v ? child_parent[i].second : child_parent[i].first;
      --degree[v];
      if (--degree[other] == 1 && other != root && !keep[other]) stack.push_back(other);
    }
  }
  std::vector<Edge> out;
  for (std::size_t i = 0; i < child_parent.size(); ++i) {
    if (removed[i]) continue;
    const auto [a, b] = child_parent[i];
    out.push_back({std::min(a, b), std::max(a, b)});
  }
  return out;
}

namespace {

struct Tuple {
  Vertex v;
  Vertex s;
  std::int64_t count;
};

std::uint64_t layer_key(Vertex y, Vertex s) { return (static_cast<std::uint64_t>(y) << 32) | s; }

bool contains(const std::vector<Vertex>& sorted, Vertex x) { return std::binary_search(sorted.begin(), sorted.end(), x); }

template <class Sampler, class MakeSampler>
bool find_tuple_parents(PassSource& stream, const std::vector<Tuple>& tuples,
                        const std::unordered_set<std::uint64_t>& previous, std::size_t bank_bytes,
                        MakeSampler&& make, std::vector<std::pair<std::uint64_t, Vertex>>& found) {
  std::unordered_map<Vertex, std::vector<Vertex>> sources_of;
  for (const auto& t : tuples) sources_of[t.v].push_back(t.s);
  bool failed = false;
  stream.run_pass([&](std::span<const EdgeUpdate> pass) {
    auto enumerate = [&](const EdgeUpdate& e, auto&& emit) {
      for (int dir = 0; dir < 2; ++dir) {
        const Vertex v = dir == 0 ? e.u : e.v;
        const Vertex y = dir == 0 ? e.v : e.u;
        auto it = sources_of.find(v);
        if (it == sources_of.end()) continue;
        for (Vertex s : it->second) {
          if (previous.count(layer_key(y, s)) != 0) emit(pack_key(0, v, s), y);
        }
      }
    };
    detail::sweep_banks_coalesced<Sampler, Vertex>(
        pass, stream.ledger(), "spanner.parent", bank_bytes, enumerate, make,
        [&](Sampler& bank, Vertex y, int sign) { bank.add(y, sign); },
        [&](std::uint64_t key, const Sampler& bank) {
          const Vertex s = key_c(key);
          const auto r = bank.first_success([&](Vertex y) { return previous.count(layer_key(y, s)) != 0; });
          if (r.kind == Outcome::Found) {
            found.emplace_back(key, r.parent);
          } else {
            failed = true;
          }
        });
  });
  // A tuple whose candidates never reached a bank cannot be served.
  if (found.size() != tuples.size()) failed = true;
  return !failed;
}

}  // namespace

InterconnectionResult interconnection_step(PassSource& stream, const ClusterPartition& partition,
                                           const std::vector<std::size_t>& unclustered, int depth, double deg,
                                           const SpannerParams& params, const SpannerConfig& config, int phase,
                                           ExploreStats* stats) {
  InterconnectionResult out;
  const Vertex n = stream.vertex_count();
  const auto cb = codebook_for(n);
  std::vector<std::uint8_t> is_center(n + 1, 0);
  for (const auto& c : partition.clusters) is_center[c.center] = 1;
  std::vector<Vertex> sources;
  for (std::size_t c : unclustered) sources.push_back(partition.clusters[c].center);
  std::sort(sources.begin(), sources.end());

  std::vector<std::vector<Vertex>> visitors(n + 1);
  std::unordered_set<std::uint64_t> previous;
  for (Vertex s : sources) {
    visitors[s] = {s};
    previous.insert(layer_key(s, s));
  }
  const std::size_t capacity = visitor_capacity(n, params.rho, config);
  const std::size_t attempts = visitor_attempts(n, deg, config);
  const std::size_t parent_attempts = repetitions(n, config.c1);
  const int lambda = ceil_log2(n);
  const std::size_t visitor_bytes = attempts * (static_cast<std::size_t>(lambda) + 1) * sizeof(CisSlot);
  std::unordered_map<Vertex, std::vector<std::pair<Vertex, Vertex>>> trees;

  for (int j = 1; j <= depth; ++j) {
    for (int retry = 0;; ++retry) {
      if (retry > 1) throw ConstructionAborted("interconnection sub-phase failed after a seed retry");
      const std::uint64_t tag = derive_seed(config.seed, {0x696e7463ULL, static_cast<std::uint64_t>(phase),
                                                          static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(retry)});
      // First pass: S_j through FindNewVisitor.
      const auto hashes = sample_family(attempts, n, lambda, derive_seed(tag, {1}));
      LevelTable table(hashes);
      for (Vertex s : sources) table.prepare(s);
      std::vector<Tuple> tuples;
      bool complete = true;
      stream.run_pass([&](std::span<const EdgeUpdate> pass) {
        auto enumerate = [&](const EdgeUpdate& e, auto&& emit) {
          for (int dir = 0; dir < 2; ++dir) {
            const Vertex v = dir == 0 ? e.u : e.v;
            const Vertex u = dir == 0 ? e.v : e.u;
            for (Vertex s : visitors[u]) {
              if (!contains(visitors[v], s)) emit(pack_key(0, v, 0), s);
            }
          }
        };
        detail::sweep_banks_coalesced<SourceSampler, Vertex>(
            pass, stream.ledger(), "spanner.visitor", visitor_bytes, enumerate,
            [&](std::uint64_t) { return SourceSampler(table, *cb); },
            [&](SourceSampler& bank, Vertex s, int sign) { bank.add(s, sign); },
            [&](std::uint64_t key, const SourceSampler& bank) {
              const auto h = bank.harvest();
              if (!h.complete) complete = false;
              for (const auto& [s, c] : h.found) tuples.push_back({key_b(key), s, c});
            });
      });
      if (stats) ++stats->passes;
      if (!complete) {
        if (stats) ++stats->retries;
        // The second pass of the sub-phase is still charged to the stream.
        stream.run_pass([](std::span<const EdgeUpdate>) {});
        if (stats) ++stats->passes;
        continue;
      }

      // Second pass: a parent on layer j-1 for every tuple.
      const auto parent_hashes = sample_family(parent_attempts, n, lambda, derive_seed(tag, {2}));
      LevelTable parent_table(parent_hashes);
      for (std::uint64_t k : previous) parent_table.prepare(k >> 32);
      std::vector<std::pair<std::uint64_t, Vertex>> found;
      bool ok;
      if (config.full_parent_bank) {
        const std::size_t bytes = parent_attempts * (static_cast<std::size_t>(lambda) + 1) * sizeof(XorSlot);
        ok = find_tuple_parents<ParentSampler>(
            stream, tuples, previous, bytes, [&](std::uint64_t) { return ParentSampler(parent_table); }, found);
      } else {
        std::unordered_map<std::uint64_t, std::int64_t> counts;
        for (const auto& t : tuples) counts[pack_key(0, t.v, t.s)] = t.count;
        ok = find_tuple_parents<SingleSlotParentSampler>(
            stream, tuples, previous, parent_attempts * sizeof(XorSlot),
            [&](std::uint64_t key) { return SingleSlotParentSampler(parent_table, counts.at(key)); }, found);
      }
      if (stats) ++stats->passes;
      if (!ok) {
        if (stats) ++stats->retries;
        continue;
      }

      std::unordered_set<std::uint64_t> current;
      std::map<Vertex, std::vector<Vertex>> additions;
      for (const auto& t : tuples) additions[t.v].push_back(t.s);
      for (auto& [v, list] : additions) {
        auto& l = visitors[v];
        for (Vertex s : list) {
          if (l.size() >= capacity) {
            ++out.overflow;
            continue;
          }
          l.insert(std::upper_bound(l.begin(), l.end(), s), s);
        }
      }
      for (const auto& [key, parent] : found) {
        const Vertex v = key_b(key);
        const Vertex s = key_c(key);
        if (!contains(visitors[v], s)) continue;
        current.insert(layer_key(v, s));
        trees[s].emplace_back(v, parent);
      }
      out.tuples += current.size();
      previous = std::move(current);
      break;
    }
  }
  if (out.overflow > 0) {
    spdlog::warn("interconnection phase {}: {} visitor entries dropped at capacity {}", phase, out.overflow, capacity);
  }

  std::set<std::uint64_t> seen;
  std::vector<Vertex> roots;
  for (const auto& [s, _] : trees) roots.push_back(s);
  std::sort(roots.begin(), roots.end());
  for (Vertex s : roots) {
    const auto& edges = trees[s];
    out.edges_before_pruning += edges.size();
    for (const Edge& e : prune_tree(edges, s, is_center)) {
      if (seen.insert(edge_name(e.u, e.v)).second) out.edges.push_back(e);
    }
  }
  return out;
}

// ---------------------------------------------------------------- driver

SpannerResult build_spanner(PassSource& stream, double eps, double kappa, double rho, const SpannerConfig& config) {
  SpannerResult result;
  result.params = spanner_schedule(stream.vertex_count(), eps, kappa, rho);
  const auto& params = result.params;
  const std::size_t start = stream.passes_taken();
  ClusterPartition partition = ClusterPartition::singletons(stream.vertex_count());
  std::set<std::uint64_t> seen;
  auto add_edges = [&](const std::vector<Edge>& edges) {
    for (const Edge& e : edges) {
      if (seen.insert(edge_name(e.u, e.v)).second) result.edges.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
    }
  };

  for (int i = 0; i <= params.ell; ++i) {
    SpannerPhaseStats ps;
    ps.phase = i;
    ps.clusters = partition.clusters.size();
    ExploreStats es;
    std::vector<std::size_t> unclustered;
    ClusterPartition next;
    if (i < params.ell) {
      auto sc = superclustering_step(stream, partition, params, i, config, &es);
      ps.sampled = sc.sampled.size();
      ps.supercluster_edges = sc.edges.size();
      add_edges(sc.edges);
      unclustered = std::move(sc.unclustered);
      next = std::move(sc.next);
    } else {
      for (std::size_t c = 0; c < partition.clusters.size(); ++c) unclustered.push_back(c);
    }
    ps.unclustered = unclustered.size();
    const int depth = i == 0 ? 1 : static_cast<int>(std::floor(params.delta[i] / 2 + 1e-9));
    auto ic = interconnection_step(stream, partition, unclustered, depth, params.deg[i], params, config, i, &es);
    ps.interconnection_edges = ic.edges.size();
    ps.edges_before_pruning = ic.edges_before_pruning;
    ps.visitor_overflow = ic.overflow;
    add_edges(ic.edges);
    ps.passes = es.passes;
    ps.retries = es.retries;
    result.phases.push_back(ps);
    partition = std::move(next);
  }
  std::sort(result.edges.begin(), result.edges.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
  result.passes = stream.passes_taken() - start;
  return result;
}

}  // namespace dgs
