#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgs/graph.hpp"
#include "dgs/stream.hpp"
#include "dgs/weight.hpp"

namespace dgs {

// Every invocation of a sampling round failed, even after the seed retry.
class ConstructionAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ⌈c₁·log_{8/7} n⌉ parallel invocations per vertex.
std::size_t repetitions(Vertex n, double c1);

struct ExploreStats {
  std::size_t passes = 0;
  std::size_t retries = 0;
};

struct BfsForest {
  std::vector<Vertex> parent;  // kNoVertex for roots and unreached vertices
  std::vector<Vertex> root;    // kNoVertex when unreached
  std::vector<int> layer;      // -1 when unreached

  bool reached(Vertex v) const { return layer[v] >= 0; }
  std::vector<Edge> edges() const;
  // v, parent(v), …, root.
  std::vector<Vertex> path_to_root(Vertex v) const;
};

struct BfsOptions {
  int depth = 1;
  double c1 = 3;
  std::uint64_t seed = 0;
};

// Independent forests sharing exactly `depth` physical passes (plus one per
// seed retry).
std::vector<BfsForest> bfs_forests(PassSource& stream, const std::vector<std::vector<Vertex>>& roots,
                                   const BfsOptions& options, ExploreStats* stats = nullptr);
BfsForest bfs_forest(PassSource& stream, const std::vector<Vertex>& roots, const BfsOptions& options,
                     ExploreStats* stats = nullptr);

struct EstimateEntry {
  int time = 0;  // 0 initial, 2p-1 stream step of phase p, 2p overlay step
  Distance dist = Distance::infinity();
  Vertex parent = kNoVertex;
  std::int64_t via = -1;  // overlay edge index, or -1 for a stream edge
};

// d̂ and p̂ with their full history, so that pointer chains can be replayed
// against the values that produced them.
class DistanceEstimates {
 public:
  DistanceEstimates() = default;
  DistanceEstimates(Vertex n, const std::vector<Vertex>& sources);

  Vertex n() const { return static_cast<Vertex>(history_.size() - 1); }
  Distance dist(Vertex v) const { return history_[v].empty() ? Distance::infinity() : history_[v].back().dist; }
  Vertex parent(Vertex v) const { return history_[v].empty() ? kNoVertex : history_[v].back().parent; }
  bool is_source(Vertex v) const { return !history_[v].empty() && history_[v].front().time == 0; }
  const std::vector<EstimateEntry>& history(Vertex v) const { return history_[v]; }
  void record(Vertex v, const EstimateEntry& entry);

  struct Chain {
    std::vector<Vertex> vertices;    // v, …, source
    std::vector<std::int64_t> via;  // per hop vertices[i] -> vertices[i+1]
  };
  // Empty when v was never reached.
  Chain chain(Vertex v) const;
  Vertex source_of(Vertex v) const;

 private:
  std::vector<std::vector<EstimateEntry>> history_;
};

struct BellmanFordOptions {
  int hops = 1;
  double zeta = 0.25;
  // Search range [low, high] for estimates.
  Distance low = Weight::from_int(1);
  Distance high = Weight::from_int(2);
  double c1 = 3;
  std::uint64_t seed = 0;
  // Offline edges relaxed after every phase.
  std::span<const HopsetEdge> overlay;
  // Hash stream edges by EdgeUpdate::origin (derived multigraphs) instead
  // of by the neighbour id.
  bool key_by_origin = false;
};

// One estimate table per source set, all sharing the same `hops` passes.
std::vector<DistanceEstimates> approx_bellman_ford(PassSource& stream, const std::vector<std::vector<Vertex>>& sources,
                                                   const BellmanFordOptions& options, ExploreStats* stats = nullptr);

}  // namespace dgs
