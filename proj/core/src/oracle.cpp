#include "dgs/oracle.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "dgs/random.hpp"

namespace dgs {

// ---------------------------------------------------------------- graph

Graph::Graph(Vertex n, const std::vector<Edge>& edges) : n_(n), adj_(static_cast<std::size_t>(n) + 1) {
  for (Edge e : edges) {
    if (e.u < 1 || e.v < 1 || e.u > n || e.v > n || e.u == e.v) throw std::invalid_argument("bad edge endpoint");
    if (e.u > e.v) std::swap(e.u, e.v);
    auto [it, inserted] = index_.emplace(edge_name(e.u, e.v), e.w);
    if (!inserted) {
      it->second = std::min(it->second, e.w);
      continue;
    }
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  for (Edge& e : edges_) {
    e.w = index_.at(edge_name(e.u, e.v));
    adj_[e.u].emplace_back(e.v, e.w);
    adj_[e.v].emplace_back(e.u, e.w);
  }
}

Weight Graph::weight(Vertex u, Vertex v) const {
  auto it = index_.find(edge_name(u, v));
  return it == index_.end() ? Weight::infinity() : it->second;
}

namespace {

Graph build_final(Vertex n, std::span<const EdgeUpdate> updates,
                  std::unordered_map<std::uint64_t, std::pair<std::int64_t, Weight>>& acc) {
  for (const auto& e : updates) {
    auto& slot = acc[edge_name(e.u, e.v)];
    slot.first += e.sign;
    slot.second = e.weight;
  }
  std::vector<Edge> edges;
  for (const auto& [name, entry] : acc) {
    if (entry.first == 1) edges.push_back({edge_name_low(name), edge_name_high(name), entry.second});
  }
  return Graph(n, edges);
}

}  // namespace

Graph materialize(PassSource& stream) {
  std::unordered_map<std::uint64_t, std::pair<std::int64_t, Weight>> acc;
  Graph g;
  stream.run_pass([&](std::span<const EdgeUpdate> updates) { g = build_final(stream.vertex_count(), updates, acc); });
  return g;
}

Graph final_graph(const MultipassStream& stream) {
  std::unordered_map<std::uint64_t, std::pair<std::int64_t, Weight>> acc;
  const auto updates = stream.updates();
  return build_final(stream.vertex_count(), updates, acc);
}

// ---------------------------------------------------------------- files

void save_edges(const std::vector<Edge>& edges, Vertex n, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# n " << n << '\n';
  for (const auto& e : edges) out << e.u << ' ' << e.v << '\n';
}

std::pair<Vertex, std::vector<Edge>> load_edges(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Vertex n = 0;
  std::vector<Edge> edges;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::istringstream is(line);
    if (line[0] == '#') {
      std::string hash, key;
      is >> hash >> key;
      if (key == "n") is >> n;
      continue;
    }
    Edge e;
    if (!(is >> e.u >> e.v)) throw ParseError(number, "expected 'u v'");
    edges.push_back(e);
  }
  return {n, edges};
}

void save_hopset(const std::vector<HopsetEdge>& edges, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& e : edges) {
    out << e.u << ' ' << e.v << ' ' << e.w.to_string() << ' ' << e.scale;
    if (!e.path.empty()) {
      out << " path:";
      for (Vertex x : e.path) out << ' ' << x;
    }
    out << '\n';
  }
}

std::vector<HopsetEdge> load_hopset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<HopsetEdge> edges;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    HopsetEdge e;
    std::string w;
    if (!(is >> e.u >> e.v >> w >> e.scale)) throw ParseError(number, "expected 'u v w k'");
    try {
      e.w = Weight::parse(w);
    } catch (const std::exception& ex) {
      throw ParseError(number, ex.what());
    }
    std::string tag;
    if (is >> tag) {
      if (tag != "path:") throw ParseError(number, "expected 'path:'");
      Vertex x;
      while (is >> x) e.path.push_back(x);
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

// ---------------------------------------------------------------- distances

std::vector<std::int64_t> exact_bfs(const Graph& g, const std::vector<Vertex>& sources) {
  std::vector<std::int64_t> dist(static_cast<std::size_t>(g.n()) + 1, kUnreached);
  std::deque<Vertex> queue;
  for (Vertex s : sources) {
    if (dist[s] == 0) continue;
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const Vertex x = queue.front();
    queue.pop_front();
    for (const auto& [y, w] : g.neighbors(x)) {
      if (dist[y] != kUnreached) continue;
      dist[y] = dist[x] + 1;
      queue.push_back(y);
    }
  }
  return dist;
}

ShortestPaths dijkstra(const Graph& g, Vertex source) {
  ShortestPaths sp;
  sp.dist.assign(static_cast<std::size_t>(g.n()) + 1, Distance::infinity());
  sp.parent.assign(static_cast<std::size_t>(g.n()) + 1, kNoVertex);
  using Item = std::pair<Distance, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  sp.dist[source] = Distance::zero();
  heap.emplace(Distance::zero(), source);
  while (!heap.empty()) {
    const auto [d, x] = heap.top();
    heap.pop();
    if (d != sp.dist[x]) continue;
    for (const auto& [y, w] : g.neighbors(x)) {
      const Distance nd = d + w;
      if (nd < sp.dist[y] || (nd == sp.dist[y] && x < sp.parent[y])) {
        const bool better = nd < sp.dist[y];
        sp.dist[y] = nd;
        sp.parent[y] = x;
        if (better) heap.emplace(nd, y);
      }
    }
  }
  return sp;
}

std::vector<Distance> hop_bounded_bf(const Graph& g, Vertex source, std::size_t hops) {
  std::vector<Distance> dist(static_cast<std::size_t>(g.n()) + 1, Distance::infinity());
  dist[source] = Distance::zero();
  std::vector<Vertex> active{source};
  std::vector<std::uint8_t> queued(dist.size(), 0);
  for (std::size_t round = 0; round < hops && !active.empty(); ++round) {
    std::vector<Distance> next = dist;
    std::vector<Vertex> changed;
    for (Vertex x : active) {
      for (const auto& [y, w] : g.neighbors(x)) {
        const Distance nd = dist[x] + w;
        if (nd < next[y]) {
          next[y] = nd;
          if (!queued[y]) {
            queued[y] = 1;
            changed.push_back(y);
          }
        }
      }
    }
    for (Vertex y : changed) queued[y] = 0;
    dist = std::move(next);
    active = std::move(changed);
  }
  return dist;
}

Graph augmented(const Graph& g, const std::vector<HopsetEdge>& extra) {
  std::vector<Edge> edges = g.edges();
  for (const auto& e : extra) edges.push_back({e.u, e.v, e.w});
  return Graph(g.n(), edges);
}

std::vector<std::pair<Vertex, Vertex>> sample_pairs(const Graph& g, const PairSample& options) {
  std::vector<std::pair<Vertex, Vertex>> pairs;
  const Vertex n = g.n();
  if (n < 2) return pairs;
  Rng rng(derive_seed(options.seed, {0x70616972ULL}));
  for (std::size_t i = 0; i < options.uniform_pairs; ++i) {
    const auto u = static_cast<Vertex>(rng.between(1, n));
    auto v = static_cast<Vertex>(rng.between(1, n - 1));
    if (v >= u) ++v;
    pairs.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::vector<Vertex> order(n);
  for (Vertex v = 1; v <= n; ++v) order[v - 1] = v;
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return g.degree(a) > g.degree(b); });
  order.resize(std::min<std::size_t>(order.size(), options.top_degree));
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      pairs.emplace_back(std::min(order[i], order[j]), std::max(order[i], order[j]));
    }
  }
  return pairs;
}

namespace {

// Pairs grouped by their first vertex, so each source is explored once.
std::vector<std::pair<Vertex, std::vector<Vertex>>> by_source(const std::vector<std::pair<Vertex, Vertex>>& pairs) {
  std::vector<std::pair<Vertex, Vertex>> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<Vertex, std::vector<Vertex>>> out;
  for (const auto& [u, v] : sorted) {
    if (out.empty() || out.back().first != u) out.push_back({u, {}});
    out.back().second.push_back(v);
  }
  return out;
}

bool within(Distance d, double factor, Distance base) {
  if (d.is_infinite()) return base.is_infinite();
  if (base.is_infinite()) return true;
  return static_cast<long double>(d.ticks()) <=
         static_cast<long double>(factor) * static_cast<long double>(base.ticks()) * (1 + 1e-12L);
}

}  // namespace

SpannerValidation validate_spanner(const Graph& g, const std::vector<Edge>& h, double eps, double beta,
                                   const PairSample& sample) {
  SpannerValidation r;
  for (const auto& e : h) {
    if (!g.has_edge(e.u, e.v)) ++r.missing_edges;
  }
  r.subgraph = r.missing_edges == 0;
  const Graph hg(g.n(), h);
  for (const auto& [u, targets] : by_source(sample_pairs(g, sample))) {
    const auto dg = exact_bfs(g, {u});
    const auto dh = exact_bfs(hg, {u});
    for (Vertex v : targets) {
      ++r.pairs;
      if (dg[v] == kUnreached) {
        if (dh[v] != kUnreached) ++r.violations;
        continue;
      }
      if (dh[v] == kUnreached || static_cast<double>(dh[v]) > (1 + eps) * static_cast<double>(dg[v]) + beta) {
        ++r.violations;
        if (dh[v] == kUnreached) continue;
      }
      const std::int64_t slack = dh[v] - dg[v];
      if (slack < 0) {
        // Only possible when H holds edges outside G.
        ++r.violations;
        continue;
      }
      if (static_cast<std::size_t>(slack) >= r.slack_histogram.size()) r.slack_histogram.resize(slack + 1, 0);
      ++r.slack_histogram[slack];
      r.worst_additive = std::max(r.worst_additive, slack);
      if (dg[v] > 0) r.worst_ratio = std::max(r.worst_ratio, static_cast<double>(dh[v]) / static_cast<double>(dg[v]));
    }
  }
  r.ok = r.subgraph && r.violations == 0;
  return r;
}

std::optional<Weight> path_weight(const Graph& g, const std::vector<Vertex>& path) {
  Weight total = Weight::zero();
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Weight w = g.weight(path[i - 1], path[i]);
    if (w.is_infinite()) return std::nullopt;
    total += w;
  }
  return total;
}

HopsetValidation validate_hopset(const Graph& g, const std::vector<HopsetEdge>& h, const HopsetCheck& check) {
  HopsetValidation r;
  const Graph gh = augmented(g, h);
  const std::size_t hops = std::min<std::size_t>(check.hopbound, g.n() > 0 ? g.n() - 1 : 0);
  std::vector<std::pair<Vertex, Vertex>> pairs;
  if (check.all_pairs) {
    for (Vertex u = 1; u <= g.n(); ++u) {
      for (Vertex v = u + 1; v <= g.n(); ++v) pairs.emplace_back(u, v);
    }
  } else {
    pairs = sample_pairs(g, check.pairs);
  }
  for (const auto& [u, targets] : by_source(pairs)) {
    const auto dg = dijkstra(g, u).dist;
    const auto db = hop_bounded_bf(gh, u, hops);
    for (Vertex v : targets) {
      ++r.pairs;
      if (db[v] < dg[v]) ++r.lower_violations;
      if (!within(db[v], 1 + check.eps, dg[v])) ++r.upper_violations;
      if (dg[v].is_finite() && db[v].is_finite() && dg[v].ticks() > 0) {
        r.worst_stretch = std::max(r.worst_stretch, static_cast<double>(db[v].ticks()) / static_cast<double>(dg[v].ticks()));
      }
    }
  }
  std::vector<std::vector<Distance>> exact(static_cast<std::size_t>(g.n()) + 1);
  auto exact_from = [&](Vertex s) -> const std::vector<Distance>& {
    if (exact[s].empty()) exact[s] = dijkstra(g, s).dist;
    return exact[s];
  };
  for (const auto& e : h) {
    if (e.w < exact_from(e.u)[e.v]) ++r.undercut_edges;
    if (check.check_paths && !e.path.empty()) {
      ++r.paths_checked;
      const auto pw = path_weight(g, e.path);
      if (!pw || *pw != e.w || e.path.front() != e.u || e.path.back() != e.v) ++r.path_violations;
    }
  }
  if (check.check_preservation) {
    bool same = true;
    for (Vertex s = 1; s <= g.n() && same; ++s) same = dijkstra(gh, s).dist == exact_from(s);
    r.distances_preserved = same;
  }
  r.ok = r.lower_violations == 0 && r.upper_violations == 0 && r.undercut_edges == 0 && r.path_violations == 0 &&
         r.distances_preserved.value_or(true);
  return r;
}

}  // namespace dgs
