#include "dgs/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dgs/random.hpp"

namespace dgs {

namespace {

void check_sources(Vertex n, const std::vector<Vertex>& sources, double rho) {
  for (Vertex s : sources) {
    if (s < 1 || s > n) throw std::invalid_argument("source outside 1..n");
  }
  if (static_cast<double>(sources.size()) > std::pow(static_cast<double>(n), rho) + 1e-9) {
    throw std::invalid_argument("at most n^rho sources are supported");
  }
}

}  // namespace

SpannerDistances::SpannerDistances(Vertex n, const std::vector<Edge>& spanner) : h_(n, spanner) {}

std::vector<std::int64_t> SpannerDistances::from(Vertex u) const { return exact_bfs(h_, {u}); }

std::int64_t SpannerDistances::distance(Vertex u, Vertex v) const {
  if (u == v) return 0;
  return from(u).at(v);
}

ApaspResult apasp_unweighted(PassSource& stream, double eps, double kappa, double rho, const SpannerConfig& config) {
  SpannerResult spanner = build_spanner(stream, eps, kappa, rho, config);
  SpannerDistances distances(stream.vertex_count(), spanner.edges);
  return {std::move(spanner), std::move(distances)};
}

UnweightedAspResult multi_source_asp_unweighted(PassSource& stream, const std::vector<Vertex>& sources, double eps,
                                                double kappa, double rho, const SpannerConfig& config) {
  const Vertex n = stream.vertex_count();
  check_sources(n, sources, rho);
  const std::size_t start = stream.passes_taken();
  UnweightedAspResult out;
  out.sources = sources;
  out.spanner = build_spanner(stream, eps, kappa, rho, config);
  const double depth = std::ceil(out.spanner.params.beta / eps - 1e-9);
  out.depth = static_cast<int>(std::min<double>(depth, std::max<Vertex>(1, n - 1)));

  std::vector<std::vector<Vertex>> roots;
  for (Vertex s : sources) roots.push_back({s});
  BfsOptions bo;
  bo.depth = out.depth;
  bo.c1 = config.c1;
  bo.seed = derive_seed(config.seed, {0x61737062ULL});
  const auto forests = roots.empty() ? std::vector<BfsForest>{} : bfs_forests(stream, roots, bo);

  const SpannerDistances h(n, out.spanner.edges);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    std::vector<std::int64_t> d = h.from(sources[i]);
    for (Vertex v = 1; v <= n; ++v) {
      if (!forests[i].reached(v)) continue;
      const std::int64_t exact = forests[i].layer[v];
      if (d[v] == kUnreached || exact < d[v]) d[v] = exact;
    }
    out.dist.push_back(std::move(d));
  }
  out.passes = stream.passes_taken() - start;
  return out;
}

std::vector<Vertex> WeightedAspResult::path(std::size_t source_index, Vertex v) const {
  auto p = expand_chain(estimates.at(source_index).chain(v), hopset.edges);
  std::reverse(p.begin(), p.end());
  return p;
}

WeightedAspResult multi_source_asp_weighted(PassSource& stream, const std::vector<Vertex>& sources, double eps,
                                            double kappa, double rho, double aspect, const HopsetConfig& config,
                                            const HopsetOverrides& overrides) {
  const Vertex n = stream.vertex_count();
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps must lie in (0, 1)");
  check_sources(n, sources, rho);
  const std::size_t start = stream.passes_taken();
  WeightedAspResult out;
  out.sources = sources;
  HopsetConfig hc = config;
  hc.path_reporting = true;
  out.hopset = multi_scale_hopset(stream, eps / 3, kappa, rho, aspect, hc, overrides);
  out.hops = out.hopset.params.hops;

  std::vector<std::vector<Vertex>> roots;
  for (Vertex s : sources) roots.push_back({s});
  if (!roots.empty()) {
    BellmanFordOptions bo;
    bo.hops = out.hops;
    bo.zeta = eps / 3;
    bo.low = Weight::from_int(1);
    bo.high = floor_distance((1 + eps) * aspect);
    bo.c1 = config.c1;
    bo.seed = derive_seed(config.seed, {0x61737077ULL});
    bo.overlay = out.hopset.edges;
    out.estimates = approx_bellman_ford(stream, roots, bo);
  }
  out.passes = stream.passes_taken() - start;
  return out;
}

}  // namespace dgs
