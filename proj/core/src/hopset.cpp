#include "dgs/hopset.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "dgs/encoding.hpp"
#include "dgs/hashing.hpp"
#include "dgs/random.hpp"
#include "dgs/samplers.hpp"
#include "sweep.hpp"

namespace dgs {

using detail::key_b;
using detail::key_c;
using detail::pack_key;

double compound(double a, double b) {
  const double p = a * b;
  const double err = std::fma(a, b, -p);
  return (a + b) + (p + err);
}

std::vector<double> epsilon_sequence(double eps2, int k0, int k_lambda) {
  std::vector<double> out;
  if (k0 > k_lambda) return out;
  const double step = compound(eps2, eps2);
  out.push_back(step);
  for (int k = k0 + 1; k <= k_lambda; ++k) out.push_back(compound(step, out.back()));
  return out;
}

double HopsetParams::eps_at(int k) const {
  if (k < k0 || eps_k.empty()) return 0;
  return eps_k.at(static_cast<std::size_t>(std::min(k, k_lambda) - k0));
}

double HopsetParams::alpha(int k) const { return std::pow(eps, ell) * std::ldexp(1.0, k + 1); }

double HopsetParams::radius(int k, int i) const {
  double r = 0;
  for (int j = 0; j < i; ++j) r += delta(k, j);
  return r;
}

double HopsetParams::delta(int k, int i) const {
  double r = 0;
  double d = 0;
  for (int j = 0; j <= i; ++j) {
    d = alpha(k) * std::pow(1 / eps, j) + 4 * r;
    r += d;
  }
  return d;
}

double HopsetParams::delta_prime(int k, int i) const {
  return (1 + compound(chi, eps_at(k - 1))) * delta(k, i);
}

double HopsetParams::stretch_bound() const { return std::pow(1 + eps2, 2 * std::log2(aspect)); }

HopsetParams hopset_schedule(Vertex n, double eps_prime, double kappa, double rho, double aspect,
                             const HopsetOverrides& overrides) {
  if (n < 2) throw std::invalid_argument("hopset needs n >= 2");
  if (!(eps_prime > 0 && eps_prime < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (!(kappa >= 2)) throw std::invalid_argument("kappa must be >= 2");
  if (!(rho <= 0.5) || rho * kappa < 1 - 1e-12) throw std::invalid_argument("rho must lie in [1/kappa, 1/2]");
  if (!(aspect >= 2)) throw std::invalid_argument("aspect ratio must be >= 2");
  if (overrides.phase_epsilon && !(*overrides.phase_epsilon > 0 && *overrides.phase_epsilon < 1)) {
    throw std::invalid_argument("phase epsilon must lie in (0, 1)");
  }
  if (overrides.chi && !(*overrides.chi > 0)) throw std::invalid_argument("chi must be positive");
  if (kappa > std::log2(static_cast<double>(n)) / 4) {
    spdlog::debug("kappa {} exceeds log2(n)/4 = {}", kappa, std::log2(static_cast<double>(n)) / 4);
  }
  HopsetParams p;
  p.n = n;
  p.eps_prime = eps_prime;
  p.kappa = kappa;
  p.rho = rho;
  p.aspect = aspect;
  const double log_kr = std::log2(kappa * rho);
  p.i0 = static_cast<int>(std::floor(log_kr + 1e-12));
  p.ell = p.i0 + static_cast<int>(std::ceil((kappa + 1) / (kappa * rho) - 1e-12)) - 1;
  p.eps2 = eps_prime / (4 * std::log2(aspect));
  p.eps = overrides.phase_epsilon.value_or(p.eps2 / (16 * kHopsetC5 * p.ell));
  p.chi = overrides.chi.value_or(p.eps2);
  p.beta = std::pow(1 / p.eps, p.ell);
  const double log_beta = std::log2(p.beta);
  p.k0 = log_beta > 62 ? 63 : static_cast<int>(std::floor(log_beta + 1e-9));
  p.k_lambda = static_cast<int>(std::ceil(std::log2(aspect) - 1e-12)) - 1;
  const double depth = std::ceil(2 * p.beta + 1 - 1e-9);
  p.hops = static_cast<int>(std::min<double>(depth, n - 1));
  const double nd = n;
  for (int i = 0; i <= p.ell; ++i) {
    p.deg.push_back(i <= p.i0 ? std::pow(nd, std::pow(2.0, i) / kappa) : std::pow(nd, rho));
  }
  p.eps_k = epsilon_sequence(p.eps2, p.k0, p.k_lambda);
  return p;
}

Distance floor_distance(double x) {
  if (!(x < 9e12)) return Distance::infinity();
  if (x <= 0) return Distance::zero();
  return Distance::from_ticks(static_cast<std::int64_t>(std::floor(x * Weight::kScale)));
}

std::vector<Vertex> expand_chain(const DistanceEstimates::Chain& chain, std::span<const HopsetEdge> lower) {
  std::vector<Vertex> path;
  if (chain.vertices.empty()) return path;
  path.push_back(chain.vertices.front());
  for (std::size_t i = 0; i + 1 < chain.vertices.size(); ++i) {
    const Vertex x = chain.vertices[i];
    const Vertex y = chain.vertices[i + 1];
    if (chain.via[i] < 0) {
      path.push_back(y);
      continue;
    }
    const HopsetEdge& h = lower[static_cast<std::size_t>(chain.via[i])];
    if (h.path.size() < 2) throw std::logic_error("lower hopset edge carries no path");
    if (h.path.front() == x && h.path.back() == y) {
      path.insert(path.end(), h.path.begin() + 1, h.path.end());
    } else if (h.path.back() == x && h.path.front() == y) {
      path.insert(path.end(), h.path.rbegin() + 1, h.path.rend());
    } else {
      throw std::logic_error("lower hopset path does not match its endpoints");
    }
  }
  return path;
}

namespace {

void idle_passes(PassSource& stream, int count, ExploreStats& stats) {
  for (int i = 0; i < count; ++i) {
    stream.run_pass([](std::span<const EdgeUpdate>) {});
    ++stats.passes;
  }
}

// Edges of one scale, deduplicated by endpoint pair keeping the lightest.
class EdgeCollector {
 public:
  void add(Vertex a, Vertex b, Distance d, int scale, std::vector<Vertex> path) {
    if (a == b) return;
    HopsetEdge e{std::min(a, b), std::max(a, b), d, scale, std::move(path)};
    if (!e.path.empty() && e.path.front() != e.u) std::reverse(e.path.begin(), e.path.end());
    auto [it, inserted] = edges_.try_emplace(edge_name(e.u, e.v), e);
    if (!inserted && e.w < it->second.w) it->second = std::move(e);
  }
  std::size_t size() const { return edges_.size(); }
  std::vector<HopsetEdge> take() {
    std::vector<HopsetEdge> out;
    out.reserve(edges_.size());
    for (auto& [_, e] : edges_) out.push_back(std::move(e));
    return out;
  }

 private:
  std::map<std::uint64_t, HopsetEdge> edges_;
};

using EntryList = std::vector<std::pair<Vertex, Distance>>;  // sorted by source

Distance lookup(const EntryList& list, Vertex s) {
  auto it = std::lower_bound(list.begin(), list.end(), s, [](const auto& e, Vertex x) { return e.first < x; });
  return it != list.end() && it->first == s ? it->second : Distance::infinity();
}

// Returns false when the entry is new and the list is full.
bool assign(EntryList& list, Vertex s, Distance d, std::size_t capacity) {
  auto it = std::lower_bound(list.begin(), list.end(), s, [](const auto& e, Vertex x) { return e.first < x; });
  if (it != list.end() && it->first == s) {
    it->second = d;
    return true;
  }
  if (list.size() >= capacity) return false;
  list.insert(it, {s, d});
  return true;
}

struct InterconnectionContext {
  const HopsetParams& params;
  const HopsetConfig& config;
  const ScaleOptions& options;
  int k;
  int phase;
};

using GuessItem = std::tuple<std::uint64_t, Vertex, std::int64_t>;

void weighted_interconnection(PassSource& stream, const std::vector<Vertex>& sources, double deg, double high_value,
                              const InterconnectionContext& ctx, EdgeCollector& out, ExploreStats& es,
                              ScaleStats& st) {
  const Vertex n = stream.vertex_count();
  const int hops = ctx.params.hops;
  const Distance low = ctx.options.min_weight;
  const Distance high = floor_distance(high_value);
  if (sources.empty() || high < low) {
    idle_passes(stream, 2 * hops, es);
    return;
  }
  const RangeLadder ladder(low, high, ctx.params.chi / (2.0 * hops));
  const double ln = std::log(static_cast<double>(n));
  const auto attempts =
      static_cast<std::size_t>(std::max(1.0, std::ceil(16 * ctx.config.c4 * ctx.config.c1_prime * deg * ln * ln)));
  const auto capacity = static_cast<std::size_t>(
      std::max(1.0, std::ceil(ctx.config.c1_prime * std::pow(static_cast<double>(n), ctx.params.rho) * ln)));
  const std::size_t guesses = repetitions(n, ctx.config.c1);
  const int lambda = ceil_log2(n);
  const std::uint64_t domain = ctx.options.multigraph ? static_cast<std::uint64_t>(n) * n : n;
  const int guess_lambda = ceil_log2(domain);
  const auto cb = codebook_for(n);
  const std::size_t candidate_bytes = attempts * (static_cast<std::size_t>(lambda) + 1) * sizeof(CisSlot);
  const std::size_t guess_bytes = guesses * (static_cast<std::size_t>(guess_lambda) + 1) * sizeof(DistSlot);
  const std::span<const HopsetEdge> lower = ctx.options.lower;

  std::vector<EntryList> current(n + 1);
  std::unordered_map<Vertex, DistanceEstimates> est;
  for (Vertex s : sources) {
    current[s] = {{s, Distance::zero()}};
    est.emplace(s, DistanceEstimates(n, {s}));
  }
  std::size_t overflow = 0;
  auto edge_key = [&](const EdgeUpdate& e, Vertex neighbour) -> std::uint64_t {
    if (!ctx.options.multigraph) return neighbour;
    return e.origin != 0 ? e.origin : pair_index(e.u, e.v, n);
  };

  for (int p = 1; p <= hops; ++p) {
    for (int retry = 0;; ++retry) {
      if (retry > 1) throw ConstructionAborted("hopset interconnection sub-phase failed after a seed retry");
      const std::uint64_t tag =
          derive_seed(ctx.config.seed, {0x68696e74ULL, static_cast<std::uint64_t>(ctx.k),
                                        static_cast<std::uint64_t>(ctx.phase), static_cast<std::uint64_t>(p),
                                        static_cast<std::uint64_t>(retry)});
      const std::vector<EntryList> frozen = current;

      // First pass: update candidates per (vertex, sub-range).
      const auto hashes = sample_family(attempts, n, lambda, derive_seed(tag, {1}));
      LevelTable table(hashes);
      for (Vertex s : sources) table.prepare(s);
      std::map<std::uint64_t, std::uint32_t> range_of;  // (v, s) -> first sub-range
      std::unordered_map<Vertex, std::size_t> listed;
      bool complete = true;
      stream.run_pass([&](std::span<const EdgeUpdate> pass) {
        auto enumerate = [&](const EdgeUpdate& e, auto&& emit) {
          for (int dir = 0; dir < 2; ++dir) {
            const Vertex v = dir == 0 ? e.u : e.v;
            const Vertex u = dir == 0 ? e.v : e.u;
            for (const auto& [s, du] : frozen[u]) {
              const Distance c = du + e.weight;
              const int j = ladder.index_of(c);
              if (j < 0 || !(c < lookup(frozen[v], s))) continue;
              emit(pack_key(0, v, static_cast<std::uint64_t>(j)), s);
            }
          }
        };
        detail::sweep_banks_coalesced<SourceSampler, Vertex>(
            pass, stream.ledger(), "hopset.candidate", candidate_bytes, enumerate,
            [&](std::uint64_t) { return SourceSampler(table, *cb); },
            [&](SourceSampler& bank, Vertex s, int sign) { bank.add(s, sign); },
            [&](std::uint64_t key, const SourceSampler& bank) {
              const auto h = bank.harvest();
              if (!h.complete) complete = false;
              const Vertex v = key_b(key);
              for (const auto& [s, count] : h.found) {
                const std::uint64_t vs = pack_key(0, v, s);
                if (range_of.count(vs) != 0) continue;
                if (listed[v] >= capacity) {
                  ++overflow;
                  continue;
                }
                ++listed[v];
                range_of.emplace(vs, key_c(key));
              }
            });
      });
      ++es.passes;
      if (!complete) {
        ++es.retries;
        idle_passes(stream, 1, es);
        continue;
      }

      // Second pass: GuessDistance per update tuple.
      std::unordered_map<Vertex, std::vector<std::pair<Vertex, std::uint32_t>>> tuples_of;
      for (const auto& [vs, j] : range_of) tuples_of[key_b(vs)].emplace_back(key_c(vs), j);
      const auto guess_hashes = sample_family(guesses, domain, guess_lambda, derive_seed(tag, {2}));
      LevelTable guess_table(guess_hashes);
      if (!ctx.options.multigraph) {
        for (Vertex u = 1; u <= n; ++u) {
          if (!frozen[u].empty()) guess_table.prepare(u);
        }
      }
      struct Accepted {
        Vertex v;
        Vertex s;
        Distance d;
        Vertex parent;
      };
      std::vector<Accepted> accepted;
      std::size_t decided = 0;
      bool failed = false;
      stream.run_pass([&](std::span<const EdgeUpdate> pass) {
        auto enumerate = [&](const EdgeUpdate& e, auto&& emit) {
          for (int dir = 0; dir < 2; ++dir) {
            const Vertex v = dir == 0 ? e.u : e.v;
            const Vertex u = dir == 0 ? e.v : e.u;
            auto it = tuples_of.find(v);
            if (it == tuples_of.end() || frozen[u].empty()) continue;
            for (const auto& [s, j] : it->second) {
              const Distance du = lookup(frozen[u], s);
              if (du.is_infinite()) continue;
              const Distance c = du + e.weight;
              if (!ladder.range(j).contains(c) || !(c < lookup(frozen[v], s))) continue;
              const std::uint64_t key = edge_key(e, u);
              if (ctx.options.multigraph) guess_table.prepare(key);
              emit(pack_key(0, v, s), GuessItem{key, u, c.ticks()});
            }
          }
        };
        detail::sweep_banks_coalesced<DistanceSampler, GuessItem>(
            pass, stream.ledger(), "hopset.guess", guess_bytes, enumerate,
            [&](std::uint64_t) { return DistanceSampler(guess_hashes, &guess_table); },
            [&](DistanceSampler& bank, const GuessItem& item, int sign) {
              bank.add(std::get<0>(item), std::get<1>(item), Distance::from_ticks(std::get<2>(item)), sign);
            },
            [&](std::uint64_t key, const DistanceSampler& bank) {
              const Vertex v = key_b(key);
              const Vertex s = key_c(key);
              const auto range = ladder.range(range_of.at(key));
              const Distance dv = lookup(frozen[v], s);
              ++decided;
              const auto r = bank.best([&](Vertex y, Distance d) {
                if (y < 1 || y > n) return false;
                const Distance dy = lookup(frozen[y], s);
                return dy.is_finite() && dy < d && range.contains(d) && d < dv;
              });
              if (r.kind == Outcome::Found) {
                accepted.push_back({v, s, r.dist, r.parent});
              } else {
                failed = true;
              }
            });
      });
      ++es.passes;
      if (failed || decided != range_of.size()) {
        ++es.retries;
        continue;
      }
      std::sort(accepted.begin(), accepted.end(),
                [](const Accepted& a, const Accepted& b) { return std::pair(a.v, a.s) < std::pair(b.v, b.s); });
      for (const auto& a : accepted) {
        if (!assign(current[a.v], a.s, a.d, capacity)) {
          ++overflow;
          continue;
        }
        est.at(a.s).record(a.v, {2 * p - 1, a.d, a.parent, -1});
      }
      break;
    }

    // Offline relaxation over the lower scales.
    if (!lower.empty()) {
      const std::vector<EntryList> snap = current;
      std::map<std::uint64_t, EstimateEntry> best;  // (b, s)
      for (std::size_t idx = 0; idx < lower.size(); ++idx) {
        const HopsetEdge& h = lower[idx];
        for (int dir = 0; dir < 2; ++dir) {
          const Vertex a = dir == 0 ? h.u : h.v;
          const Vertex b = dir == 0 ? h.v : h.u;
          for (const auto& [s, da] : snap[a]) {
            const Distance c = da + h.w;
            if (high < c || !(c < lookup(snap[b], s))) continue;
            auto [it, inserted] = best.try_emplace(pack_key(0, b, s), EstimateEntry{2 * p, c, a, static_cast<std::int64_t>(idx)});
            if (!inserted && c < it->second.dist) it->second = {2 * p, c, a, static_cast<std::int64_t>(idx)};
          }
        }
      }
      for (const auto& [bs, entry] : best) {
        const Vertex b = key_b(bs);
        const Vertex s = key_c(bs);
        if (!assign(current[b], s, entry.dist, capacity)) {
          ++overflow;
          continue;
        }
        est.at(s).record(b, entry);
      }
    }
  }
  if (overflow > 0) {
    spdlog::warn("hopset scale {} phase {}: {} estimate entries dropped at capacity {}", ctx.k, ctx.phase, overflow,
                 capacity);
  }
  st.overflow += overflow;

  for (Vertex s : sources) {
    const auto& e = est.at(s);
    for (Vertex t : sources) {
      if (t == s) continue;
      const Distance d = lookup(current[t], s);
      if (d.is_infinite() || high < d) continue;
      std::vector<Vertex> path;
      if (!ctx.options.multigraph) path = expand_chain(e.chain(t), lower);
      out.add(s, t, d, ctx.k, std::move(path));
      ++st.interconnection_edges;
    }
  }
}

}  // namespace

std::vector<HopsetEdge> single_scale_hopset(PassSource& stream, int k, const HopsetParams& params,
                                            const HopsetConfig& config, const ScaleOptions& options,
                                            ScaleStats* stats) {
  ScaleStats local;
  ScaleStats& st = stats ? *stats : local;
  st.scale = k;
  if (k < params.k0) return {};
  const Vertex n = stream.vertex_count();
  if (n != params.n) throw std::invalid_argument("hopset parameters were computed for a different n");

  std::vector<Vertex> vertices = options.vertices;
  if (vertices.empty()) {
    for (Vertex v = 1; v <= n; ++v) vertices.push_back(v);
  }
  std::sort(vertices.begin(), vertices.end());
  struct Cluster {
    Vertex center;
    std::vector<Vertex> members;
  };
  std::vector<Cluster> partition;
  for (Vertex v : vertices) partition.push_back({v, {v}});

  EdgeCollector out;
  ExploreStats es;
  const InterconnectionContext ctx{params, config, options, k, 0};
  for (int i = 0; i <= params.ell; ++i) {
    st.clusters.push_back(partition.size());
    const double dp = params.delta_prime(k, i);
    std::vector<Vertex> unclustered;
    std::vector<Cluster> next;
    if (i < params.ell) {
      Rng rng(derive_seed(config.seed, {0x6873616dULL, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)}));
      const double prob = 1.0 / params.deg[i];
      std::vector<std::uint8_t> sampled(partition.size(), 0);
      std::vector<Vertex> roots;
      std::unordered_map<Vertex, std::size_t> slot_of_root;
      for (std::size_t c = 0; c < partition.size(); ++c) {
        if (rng.unit() < prob) {
          sampled[c] = 1;
          roots.push_back(partition[c].center);
          slot_of_root[partition[c].center] = next.size();
          next.push_back(partition[c]);
        }
      }
      const Distance high = floor_distance(dp);
      if (roots.empty() || high < options.min_weight) {
        idle_passes(stream, params.hops, es);
        for (std::size_t c = 0; c < partition.size(); ++c) {
          if (!sampled[c]) unclustered.push_back(partition[c].center);
        }
      } else {
        BellmanFordOptions bo;
        bo.hops = params.hops;
        bo.zeta = params.chi;
        bo.low = options.min_weight;
        bo.high = high;
        bo.c1 = config.c1;
        bo.seed = derive_seed(config.seed, {0x68737570ULL, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(i)});
        bo.overlay = options.lower;
        bo.key_by_origin = options.multigraph;
        const auto est = std::move(approx_bellman_ford(stream, {roots}, bo, &es).front());
        for (std::size_t c = 0; c < partition.size(); ++c) {
          if (sampled[c]) continue;
          const Vertex x = partition[c].center;
          const Distance d = est.dist(x);
          if (d.is_infinite() || high < d) {
            unclustered.push_back(x);
            continue;
          }
          const auto chain = est.chain(x);
          const Vertex root = chain.vertices.back();
          auto& target = next[slot_of_root.at(root)];
          target.members.insert(target.members.end(), partition[c].members.begin(), partition[c].members.end());
          std::vector<Vertex> path;
          if (!options.multigraph) path = expand_chain(chain, options.lower);
          out.add(root, x, d, k, std::move(path));
          ++st.supercluster_edges;
        }
      }
    } else {
      for (const auto& c : partition) unclustered.push_back(c.center);
    }
    std::sort(unclustered.begin(), unclustered.end());
    InterconnectionContext phase_ctx = ctx;
    phase_ctx.phase = i;
    weighted_interconnection(stream, unclustered, params.deg[i], dp / 2, phase_ctx, out, es, st);
    for (auto& c : next) std::sort(c.members.begin(), c.members.end());
    partition = std::move(next);
  }
  st.passes = es.passes;
  st.retries = es.retries;
  return out.take();
}

HopsetResult multi_scale_hopset(PassSource& stream, double eps_prime, double kappa, double rho, double aspect,
                                const HopsetConfig& config, const HopsetOverrides& overrides) {
  HopsetResult result;
  result.params = hopset_schedule(stream.vertex_count(), eps_prime, kappa, rho, aspect, overrides);
  const std::size_t start = stream.passes_taken();
  for (int k = result.params.k0; k <= result.params.k_lambda; ++k) {
    ScaleOptions options;
    options.lower = result.edges;
    ScaleStats st;
    auto edges = single_scale_hopset(stream, k, result.params, config, options, &st);
    result.scales.push_back(std::move(st));
    result.edges.insert(result.edges.end(), std::make_move_iterator(edges.begin()), std::make_move_iterator(edges.end()));
  }
  if (!config.path_reporting) {
    for (auto& e : result.edges) e.path.clear();
  }
  result.passes = stream.passes_taken() - start;
  return result;
}

}  // namespace dgs
