#pragma once

#include <cstdint>
#include <vector>

#include "dgs/explore.hpp"
#include "dgs/graph.hpp"
#include "dgs/stream.hpp"

namespace dgs {

struct SpannerParams {
  Vertex n = 0;
  double eps = 0.5;
  double kappa = 4;
  double rho = 0.5;
  int i0 = 0;
  int ell = 0;
  // Indexed by phase 0..ell.
  std::vector<double> deg;
  std::vector<double> delta;
  std::vector<double> radius;
  double beta = 0;
};

// Rejects ε outside (0, 1), κ < 2, ρ outside [1/κ, 1/2] and κρ < 1.
SpannerParams spanner_schedule(Vertex n, double eps, double kappa, double rho);

struct Cluster {
  Vertex center = kNoVertex;
  std::vector<Vertex> members;  // sorted, contains the center
};

struct ClusterPartition {
  std::vector<Cluster> clusters;

  static ClusterPartition singletons(Vertex n);
};

struct SpannerConfig {
  double c1 = 3;
  double c1_prime = 3;
  double c4 = 2;
  std::uint64_t seed = 1;
  // Use the full slot ladder for the second-pass FindParent instead of the
  // single slot chosen from the known count.
  bool full_parent_bank = false;
};

// 𝒩 = c′₁·deg·ln n and μ = ⌈16·c₄·𝒩·ln n⌉.
std::size_t visitor_attempts(Vertex n, double deg, const SpannerConfig& config);
// ⌈c′₁·n^ρ·ln n⌉ entries per visitor list.
std::size_t visitor_capacity(Vertex n, double rho, const SpannerConfig& config);

struct SuperclusterResult {
  ClusterPartition next;
  std::vector<Edge> edges;
  std::vector<std::size_t> sampled;      // indices into the input partition
  std::vector<std::size_t> unclustered;  // U_i
};

SuperclusterResult superclustering_step(PassSource& stream, const ClusterPartition& partition,
                                        const SpannerParams& params, int phase, const SpannerConfig& config,
                                        ExploreStats* stats = nullptr);

struct InterconnectionResult {
  std::vector<Edge> edges;  // after pruning
  std::size_t edges_before_pruning = 0;
  std::size_t tuples = 0;
  std::size_t overflow = 0;
};

InterconnectionResult interconnection_step(PassSource& stream, const ClusterPartition& partition,
                                           const std::vector<std::size_t>& unclustered, int depth, double deg,
                                           const SpannerParams& params, const SpannerConfig& config, int phase,
                                           ExploreStats* stats = nullptr);

// Iteratively removes leaves of the forest that are not in `keep`. Each
// tree is given as child -> parent edges.
std::vector<Edge> prune_tree(const std::vector<std::pair<Vertex, Vertex>>& child_parent, Vertex root,
                             const std::vector<std::uint8_t>& keep);

struct SpannerPhaseStats {
  int phase = 0;
  std::size_t clusters = 0;
  std::size_t sampled = 0;
  std::size_t unclustered = 0;
  std::size_t supercluster_edges = 0;
  std::size_t interconnection_edges = 0;
  std::size_t edges_before_pruning = 0;
  std::size_t passes = 0;
  std::size_t retries = 0;
  std::size_t visitor_overflow = 0;
};

struct SpannerResult {
  std::vector<Edge> edges;  // sorted, u < v
  SpannerParams params;
  std::vector<SpannerPhaseStats> phases;
  std::size_t passes = 0;
};

SpannerResult build_spanner(PassSource& stream, double eps, double kappa, double rho, const SpannerConfig& config);

}  // namespace dgs
