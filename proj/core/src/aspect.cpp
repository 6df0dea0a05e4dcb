#include "dgs/aspect.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "dgs/hashing.hpp"
#include "dgs/random.hpp"
#include "sweep.hpp"

namespace dgs {

using detail::key_a;
using detail::key_b;
using detail::pack_key;

double light_threshold(double eps, Vertex n, int k) { return eps / n * std::ldexp(1.0, k); }

int weight_class(Weight w, double eps, Vertex n, int k_first, int k_last) {
  for (int k = k_first; k <= k_last; ++k) {
    if (w <= floor_distance(light_threshold(eps, n, k))) return k;
  }
  return -1;
}

bool in_relevant_window(Weight w, Vertex n, int k) {
  const auto t = static_cast<double>(w.ticks());
  return t > std::ldexp(1.0, k) / n * Weight::kScale && t <= std::ldexp(1.0, k + 1) * Weight::kScale;
}

Weight star_weight(double eps, Vertex n, int k, std::size_t size) {
  return Weight::ceil_of(light_threshold(eps, n, k) * static_cast<double>(size));
}

Weight node_edge_weight(Weight w, double eps, Vertex n, int k, std::size_t size_x, std::size_t size_y) {
  return w + Weight::ceil_of(light_threshold(eps, n, k) * static_cast<double>(size_x + size_y));
}

namespace {

// Count, XOR of edge ids and a sum of id fingerprints. A single surviving
// edge is recognised by count = ±1 and a matching fingerprint.
struct EdgeSlot {
  std::int64_t count = 0;
  std::uint64_t id = 0;
  std::int64_t fp = 0;
  bool zero() const { return count == 0 && id == 0 && fp == 0; }
  void merge(const EdgeSlot& o) {
    count += o.count;
    id ^= o.id;
    fp += o.fp;
  }
};

std::int64_t fingerprint(std::uint64_t id) { return static_cast<std::int64_t>(splitmix64(id) & ((1ULL << 40) - 1)); }

// Per-copy ladders stored at the first level of each item, level-major.
class EdgeSketch {
 public:
  EdgeSketch(std::span<const PairwiseHash> hashes, int lambda)
      : hashes_(hashes), levels_(static_cast<std::size_t>(lambda) + 1), data_(hashes.size() * levels_) {}

  // sign already carries the endpoint orientation.
  void add(std::uint64_t id, int sign) {
    const std::int64_t f = fingerprint(id);
    for (std::size_t c = 0; c < hashes_.size(); ++c) {
      auto& s = data_[static_cast<std::size_t>(hashes_[c].level(id)) * hashes_.size() + c];
      s.count += sign;
      if (sign & 1) s.id ^= id;
      s.fp += sign * f;
    }
  }
  void merge(const EdgeSketch& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i].merge(o.data_[i]);
  }
  bool empty() const {
    EdgeSlot total;
    for (std::size_t l = 0; l < levels_; ++l) total.merge(data_[l * hashes_.size()]);
    return total.zero();
  }
  // First level of copy c whose prefix holds a single verified edge.
  std::optional<std::uint64_t> recover(std::size_t c, const std::function<bool(std::uint64_t)>& valid) const {
    EdgeSlot acc;
    for (std::size_t l = 0; l < levels_; ++l) {
      acc.merge(data_[l * hashes_.size() + c]);
      if ((acc.count == 1 || acc.count == -1) && acc.fp == acc.count * fingerprint(acc.id) && valid(acc.id)) {
        return acc.id;
      }
    }
    return std::nullopt;
  }
  std::size_t copies() const { return hashes_.size(); }
  std::size_t bytes() const { return data_.size() * sizeof(EdgeSlot); }

 private:
  std::span<const PairwiseHash> hashes_;
  std::size_t levels_;
  std::vector<EdgeSlot> data_;
};

struct Dsu {
  std::vector<Vertex> parent;
  explicit Dsu(Vertex n) : parent(n + 1) { std::iota(parent.begin(), parent.end(), 0); }
  Vertex find(Vertex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Smaller root wins, so roots are component minima.
  bool unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

struct PassOne {
  // (class index, vertex) -> sketch
  std::map<std::uint64_t, EdgeSketch> sketches;
  std::vector<std::int64_t> window_count;  // per scale
};

class ExtractionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PassOne sketch_pass(PassSource& stream, double eps, int k_first, int k_last, std::span<const PairwiseHash> hashes,
                    int lambda) {
  const Vertex n = stream.vertex_count();
  const std::size_t scales = static_cast<std::size_t>(k_last - k_first + 1);
  PassOne out;
  out.window_count.assign(scales, 0);
  std::vector<Distance> thresholds;
  for (int k = k_first; k <= k_last; ++k) thresholds.push_back(floor_distance(light_threshold(eps, n, k)));
  const std::size_t bytes = EdgeSketch(hashes, lambda).bytes();
  using Item = std::pair<std::uint64_t, int>;  // edge id, orientation
  stream.run_pass([&](std::span<const EdgeUpdate> pass) {
    for (const auto& e : pass) {
      for (std::size_t i = 0; i < scales; ++i) {
        if (in_relevant_window(e.weight, n, k_first + static_cast<int>(i))) out.window_count[i] += e.sign;
      }
    }
    auto enumerate = [&](const EdgeUpdate& e, auto&& emit) {
      if (e.u == e.v) return;
      auto it = std::lower_bound(thresholds.begin(), thresholds.end(), e.weight);
      if (it == thresholds.end()) return;
      const auto cls = static_cast<std::uint64_t>(it - thresholds.begin());
      const std::uint64_t id = pair_index(e.u, e.v, n);
      emit(pack_key(cls, std::min(e.u, e.v), 0), Item{id, +1});
      emit(pack_key(cls, std::max(e.u, e.v), 0), Item{id, -1});
    };
    detail::sweep_banks_coalesced<EdgeSketch, Item>(
        pass, stream.ledger(), "aspect.sketch", bytes, enumerate,
        [&](std::uint64_t) { return EdgeSketch(hashes, lambda); },
        [&](EdgeSketch& bank, const Item& item, int net) { bank.add(item.first, net * item.second); },
        [&](std::uint64_t key, const EdgeSketch& bank) { out.sketches.emplace(key, bank); });
  });
  return out;
}

NodeHierarchy merge_scales(const PassOne& sketches, Vertex n, double eps, int k_first, int k_last,
                           std::span<const PairwiseHash> hashes, int lambda) {
  NodeHierarchy h;
  h.n = n;
  h.eps = eps;
  h.k_first = k_first;
  h.k_last = k_last;
  h.lists.resize(n + 1);
  std::vector<Vertex> center(n + 1);
  std::vector<std::uint32_t> size(n + 1, 1);
  std::iota(center.begin(), center.end(), 0);
  Dsu dsu(n);
  std::map<std::uint64_t, HopsetEdge> stars;
  for (int k = k_first; k <= k_last; ++k) {
    const auto cls = static_cast<std::uint64_t>(k - k_first);
    NodeScale scale;
    scale.k = k;
    const std::vector<Vertex> prev_center = center;
    const std::vector<std::uint32_t> prev_size = size;
    for (std::size_t round = 0;; ++round) {
      std::map<Vertex, std::vector<Vertex>> comps;
      for (Vertex v = 1; v <= n; ++v) comps[dsu.find(v)].push_back(v);
      std::vector<std::pair<Vertex, Vertex>> found;
      for (const auto& [root, members] : comps) {
        EdgeSketch sum(hashes, lambda);
        bool touched = false;
        for (Vertex v : members) {
          auto it = sketches.sketches.find(pack_key(cls, v, 0));
          if (it == sketches.sketches.end()) continue;
          sum.merge(it->second);
          touched = true;
        }
        if (!touched || sum.empty()) continue;
        auto valid = [&](std::uint64_t id) {
          if (id < 1 || id > static_cast<std::uint64_t>(n) * n) return false;
          const auto lo = static_cast<Vertex>((id - 1) / n + 1);
          const auto hi = static_cast<Vertex>(id - static_cast<std::uint64_t>(lo - 1) * n);
          if (lo >= hi || hi > n) return false;
          return (dsu.find(lo) == root) != (dsu.find(hi) == root);
        };
        std::optional<std::uint64_t> id;
        for (std::size_t t = 0; t < sum.copies() && !id; ++t) {
          id = sum.recover((round + t) % sum.copies(), valid);
          if (!id) ++h.copy_fallbacks;
        }
        if (!id) throw ExtractionFailed("no copy yields an outgoing edge");
        const auto lo = static_cast<Vertex>((*id - 1) / n + 1);
        found.emplace_back(lo, static_cast<Vertex>(*id - static_cast<std::uint64_t>(lo - 1) * n));
      }
      if (found.empty()) break;
      for (const auto& [a, b] : found) dsu.unite(a, b);
      scale.rounds = round + 1;
    }
    // The new center is the center of the largest constituent node.
    std::map<Vertex, std::pair<std::uint32_t, Vertex>> best;  // root -> (size, center)
    std::map<Vertex, std::uint32_t> total;
    for (Vertex v = 1; v <= n; ++v) {
      const Vertex r = dsu.find(v);
      ++total[r];
      if (prev_center[v] != v) continue;
      auto [it, inserted] = best.try_emplace(r, prev_size[v], v);
      if (!inserted && (prev_size[v] > it->second.first ||
                        (prev_size[v] == it->second.first && v < it->second.second))) {
        it->second = {prev_size[v], v};
      }
    }
    for (Vertex v = 1; v <= n; ++v) {
      const Vertex r = dsu.find(v);
      const Vertex c = best.at(r).second;
      size[v] = total.at(r);
      if (c != center[v]) {
        center[v] = c;
        h.lists[v].emplace_back(k, c);
        HopsetEdge e{std::min(c, v), std::max(c, v), star_weight(eps, n, k, size[v]), k, {}};
        auto [it, inserted] = stars.try_emplace(edge_name(c, v), e);
        if (!inserted && e.w < it->second.w) it->second = e;
      }
    }
    scale.center = center;
    scale.size = size;
    for (const auto& [r, bc] : best) scale.centers.push_back(bc.second);
    std::sort(scale.centers.begin(), scale.centers.end());
    h.scales.push_back(std::move(scale));
  }
  for (auto& [_, e] : stars) h.star_edges.push_back(std::move(e));
  return h;
}

}  // namespace

NodeHierarchy compute_nodes(PassSource& stream, double eps, int k_first, int k_last, const NodeOptions& options,
                            ExploreStats* stats) {
  const Vertex n = stream.vertex_count();
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (k_last - k_first >= (1 << 15)) throw std::invalid_argument("too many scales");
  if (k_first > k_last) {
    NodeHierarchy h;
    h.n = n;
    h.eps = eps;
    h.k_first = k_first;
    h.k_last = k_last;
    h.lists.resize(n + 1);
    return h;
  }
  const std::uint64_t domain = static_cast<std::uint64_t>(n) * n;
  const int lambda = ceil_log2(domain);
  const auto copies = static_cast<std::size_t>(std::max(1.0, std::ceil(options.c1 * std::log2(std::max<double>(n, 2)))));
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto hashes = sample_family(copies, domain, lambda, derive_seed(options.seed, {0x63636bULL, static_cast<std::uint64_t>(attempt)}));
    const PassOne sketches = sketch_pass(stream, eps, k_first, k_last, hashes, lambda);
    if (stats) ++stats->passes;
    try {
      NodeHierarchy h = merge_scales(sketches, n, eps, k_first, k_last, hashes, lambda);
      for (int k = k_first; k <= k_last; ++k) {
        if (sketches.window_count[static_cast<std::size_t>(k - k_first)] > 0) h.relevant.push_back(k);
      }
      h.retries = static_cast<std::size_t>(attempt);
      return h;
    } catch (const ExtractionFailed&) {
      spdlog::warn("component extraction failed in every sketch copy; retrying the sketch pass");
      if (stats) ++stats->retries;
    }
  }
  throw ConstructionAborted("component extraction failed after a seed retry");
}

NodeGraphStream::NodeGraphStream(PassSource& base, const NodeHierarchy& nodes, int k)
    : base_(base), nodes_(nodes), k_(k) {
  if (k < nodes.k_first || k > nodes.k_last) throw std::out_of_range("scale outside the node hierarchy");
}

std::optional<EdgeUpdate> NodeGraphStream::translate(const EdgeUpdate& e) const {
  if (static_cast<double>(e.weight.ticks()) > std::ldexp(1.0, k_ + 1) * Weight::kScale) return std::nullopt;
  const NodeScale& s = nodes_.scale(k_);
  const Vertex x = s.center[e.u];
  const Vertex y = s.center[e.v];
  if (x == y) return std::nullopt;
  EdgeUpdate t;
  t.u = x;
  t.v = y;
  t.sign = e.sign;
  t.weight = node_edge_weight(e.weight, nodes_.eps, nodes_.n, k_, s.size[e.u], s.size[e.v]);
  t.origin = pair_index(e.u, e.v, nodes_.n);
  return t;
}

void NodeGraphStream::run_pass(const PassConsumer& consume) {
  base_.run_pass([&](std::span<const EdgeUpdate> pass) {
    std::vector<EdgeUpdate> out;
    out.reserve(pass.size());
    for (const auto& e : pass) {
      if (auto t = translate(e)) out.push_back(*t);
    }
    consume(out);
  });
}

ReductionResult aspect_ratio_reduce(PassSource& stream, double eps_prime, double kappa, double rho, double aspect,
                                    const HopsetConfig& config, const HopsetOverrides& overrides) {
  ReductionResult result;
  HopsetResult& hs = result.hopset;
  hs.params = hopset_schedule(stream.vertex_count(), eps_prime, kappa, rho, aspect, overrides);
  const HopsetParams& params = hs.params;
  const Vertex n = stream.vertex_count();
  const double eps = eps_prime / 24;
  const std::size_t start = stream.passes_taken();
  if (!params.has_scales()) {
    result.nodes.n = n;
    result.nodes.eps = eps;
    result.nodes.lists.resize(n + 1);
    return result;
  }
  NodeOptions node_options;
  node_options.c1 = config.c1;
  node_options.seed = derive_seed(config.seed, {0x6e6f6465ULL});
  result.nodes = compute_nodes(stream, eps, params.k0, params.k_lambda, node_options);
  const NodeHierarchy& nodes = result.nodes;

  std::vector<int> scales;
  for (int k : nodes.relevant) {
    if (nodes.scale(k).centers.size() >= 2) scales.push_back(k);
  }
  std::vector<std::vector<HopsetEdge>> built(scales.size());
  hs.scales.resize(scales.size());
  std::vector<std::function<void(PassSource&)>> jobs;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    jobs.push_back([&, i](PassSource& participant) {
      const int k = scales[i];
      NodeGraphStream graph(participant, nodes, k);
      ScaleOptions options;
      options.vertices = nodes.scale(k).centers;
      options.multigraph = true;
      options.min_weight = floor_distance(light_threshold(eps, n, k + 1));
      HopsetConfig scale_config = config;
      scale_config.seed = derive_seed(config.seed, {0x6e67ULL, static_cast<std::uint64_t>(k)});
      built[i] = single_scale_hopset(graph, k, params, scale_config, options, &hs.scales[i]);
    });
  }
  run_interleaved(stream, jobs);

  std::map<std::uint64_t, HopsetEdge> merged;
  auto keep = [&](const HopsetEdge& e) {
    auto [it, inserted] = merged.try_emplace(edge_name(e.u, e.v), e);
    if (!inserted && e.w < it->second.w) it->second = e;
  };
  for (const auto& e : nodes.star_edges) keep(e);
  for (const auto& edges : built) {
    for (const auto& e : edges) keep(e);
  }
  for (auto& [_, e] : merged) hs.edges.push_back(std::move(e));
  hs.star_edges = nodes.star_edges.size();
  hs.passes = stream.passes_taken() - start;
  return result;
}

}  // namespace dgs
