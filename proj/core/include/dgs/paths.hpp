#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dgs/explore.hpp"
#include "dgs/graph.hpp"
#include "dgs/hopset.hpp"
#include "dgs/oracle.hpp"
#include "dgs/spanner.hpp"
#include "dgs/stream.hpp"

namespace dgs {

// Distances answered on demand by BFS over the stored spanner.
class SpannerDistances {
 public:
  SpannerDistances(Vertex n, const std::vector<Edge>& spanner);
  // Hop distance in H, kUnreached when disconnected.
  std::int64_t distance(Vertex u, Vertex v) const;
  std::vector<std::int64_t> from(Vertex u) const;
  const Graph& graph() const { return h_; }

 private:
  Graph h_;
};

struct ApaspResult {
  SpannerResult spanner;
  SpannerDistances distances;
};

// d_G <= d̂ <= (1+ε)·d_G + β.
ApaspResult apasp_unweighted(PassSource& stream, double eps, double kappa, double rho, const SpannerConfig& config);

struct UnweightedAspResult {
  std::vector<Vertex> sources;
  // dist[i][v] for source i, kUnreached when disconnected.
  std::vector<std::vector<std::int64_t>> dist;
  int depth = 0;  // exact BFS depth min(⌈β/ε⌉, n - 1)
  SpannerResult spanner;
  std::size_t passes = 0;
};

// Minimum of the exact depth-bounded BFS and the spanner distance. Needs
// |S| <= n^ρ.
UnweightedAspResult multi_source_asp_unweighted(PassSource& stream, const std::vector<Vertex>& sources, double eps,
                                                double kappa, double rho, const SpannerConfig& config);

struct WeightedAspResult {
  std::vector<Vertex> sources;
  HopsetResult hopset;
  std::vector<DistanceEstimates> estimates;  // per source
  int hops = 0;
  std::size_t passes = 0;

  Distance distance(std::size_t source_index, Vertex v) const { return estimates.at(source_index).dist(v); }
  // G path s … v whose weight is the estimate; empty when v is unreached.
  std::vector<Vertex> path(std::size_t source_index, Vertex v) const;
};

// Path-reporting hopset with ε/3, then Bellman-Ford over G ∪ H with ζ = ε/3.
// Weights are at least 1 and Λ bounds every distance. Needs |S| <= n^ρ.
WeightedAspResult multi_source_asp_weighted(PassSource& stream, const std::vector<Vertex>& sources, double eps,
                                            double kappa, double rho, double aspect, const HopsetConfig& config,
                                            const HopsetOverrides& overrides = {});

}  // namespace dgs
