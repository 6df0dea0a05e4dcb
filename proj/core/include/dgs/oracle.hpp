#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dgs/graph.hpp"
#include "dgs/weight.hpp"

namespace dgs {

inline constexpr std::int64_t kUnreached = -1;

// Hop distances from the nearest vertex of S; kUnreached when disconnected.
std::vector<std::int64_t> exact_bfs(const Graph& g, const std::vector<Vertex>& sources);

struct ShortestPaths {
  std::vector<Distance> dist;
  std::vector<Vertex> parent;
};

ShortestPaths dijkstra(const Graph& g, Vertex source);

// d^{(t)}(s, ·): t rounds of synchronous relaxation.
std::vector<Distance> hop_bounded_bf(const Graph& g, Vertex source, std::size_t hops);

// G plus extra edges; parallel edges keep the lighter weight.
Graph augmented(const Graph& g, const std::vector<HopsetEdge>& extra);

struct PairSample {
  std::size_t uniform_pairs = 500;
  std::size_t top_degree = 32;
  std::uint64_t seed = 1;
};

// Uniform pairs plus every pair among the highest-degree vertices, u < v.
std::vector<std::pair<Vertex, Vertex>> sample_pairs(const Graph& g, const PairSample& options);

struct SpannerValidation {
  bool ok = true;
  bool subgraph = true;
  std::size_t missing_edges = 0;
  std::size_t pairs = 0;
  std::size_t violations = 0;
  // Pair with the largest d_H / d_G and the pair with the largest d_H - d_G.
  double worst_ratio = 1.0;
  std::int64_t worst_additive = 0;
  // additive slack d_H - d_G -> count
  std::vector<std::size_t> slack_histogram;
};

SpannerValidation validate_spanner(const Graph& g, const std::vector<Edge>& h, double eps, double beta,
                                   const PairSample& pairs);

struct HopsetValidation {
  bool ok = true;
  std::size_t pairs = 0;
  // d_G <= d^{(β)}_{G∪H}, i.e. no hopset edge undercuts a true distance.
  std::size_t lower_violations = 0;
  // d^{(β)}_{G∪H} <= (1+ε)·d_G.
  std::size_t upper_violations = 0;
  double worst_stretch = 1.0;
  // Every edge weight >= d_G(u, v).
  std::size_t undercut_edges = 0;
  std::size_t paths_checked = 0;
  std::size_t path_violations = 0;
  // d_{G∪H} = d_G over all pairs, when requested.
  std::optional<bool> distances_preserved;
};

struct HopsetCheck {
  double eps = 0.5;
  std::size_t hopbound = 0;
  PairSample pairs;
  bool all_pairs = false;
  bool check_paths = true;
  bool check_preservation = false;
};

HopsetValidation validate_hopset(const Graph& g, const std::vector<HopsetEdge>& h, const HopsetCheck& check);

// Weight of an implementing path in G; nullopt when a step is not an edge.
std::optional<Weight> path_weight(const Graph& g, const std::vector<Vertex>& path);

}  // namespace dgs
