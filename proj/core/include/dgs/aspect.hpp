#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dgs/explore.hpp"
#include "dgs/hopset.hpp"
#include "dgs/stream.hpp"

namespace dgs {

// Light edges of scale k weigh at most (ε/n)·2^k.
double light_threshold(double eps, Vertex n, int k);
// Smallest k in [k_first, k_last] with w <= (ε/n)·2^k, or -1 when w is heavy
// for every scale.
int weight_class(Weight w, double eps, Vertex n, int k_first, int k_last);
// Scale k is relevant when some edge weight lies in (2^k/n, 2^{k+1}].
bool in_relevant_window(Weight w, Vertex n, int k);
// ⌈(ε/n)·2^k·size⌉.
Weight star_weight(double eps, Vertex n, int k, std::size_t size);
// w + ⌈(ε/n)·2^k·(|X| + |Y|)⌉.
Weight node_edge_weight(Weight w, double eps, Vertex n, int k, std::size_t size_x, std::size_t size_y);

// Connected components of the light edges of one scale.
struct NodeScale {
  int k = 0;
  std::vector<Vertex> center;       // per vertex, index 0 unused
  std::vector<std::uint32_t> size;  // size of the node holding each vertex
  std::vector<Vertex> centers;      // sorted
  std::size_t rounds = 0;           // merging rounds
};

struct NodeHierarchy {
  Vertex n = 0;
  double eps = 0;
  int k_first = 0;
  int k_last = -1;
  std::vector<NodeScale> scales;  // k_first .. k_last
  std::vector<HopsetEdge> star_edges;
  // Per vertex: (k, new center) every time the center of its node changes.
  std::vector<std::vector<std::pair<int, Vertex>>> lists;
  std::vector<int> relevant;  // relevant scales in [k_first, k_last]
  std::size_t copy_fallbacks = 0;
  std::size_t retries = 0;

  const NodeScale& scale(int k) const { return scales.at(static_cast<std::size_t>(k - k_first)); }
};

struct NodeOptions {
  double c1 = 3;  // ⌈c₁·log2 n⌉ sketch copies per vertex and scale
  std::uint64_t seed = 1;
};

// One pass of XOR sketches per vertex and weight class, then offline
// component merging from the lightest class upwards. One more pass when
// extraction fails in every copy.
NodeHierarchy compute_nodes(PassSource& stream, double eps, int k_first, int k_last, const NodeOptions& options,
                            ExploreStats* stats = nullptr);

// The node graph of scale k as a pass source: every update (x, y, w) with
// w <= 2^{k+1} and distinct nodes X, Y becomes (X*, Y*, w + (ε/n)·2^k·(|X|+|Y|)),
// keeping the pair (x, y) as its origin.
class NodeGraphStream final : public PassSource {
 public:
  NodeGraphStream(PassSource& base, const NodeHierarchy& nodes, int k);
  Vertex vertex_count() const override { return base_.vertex_count(); }
  bool weighted() const override { return true; }
  void run_pass(const PassConsumer& consume) override;
  std::size_t passes_taken() const override { return base_.passes_taken(); }
  SpaceLedger& ledger() override { return base_.ledger(); }

  // Translation of a single update; nullopt when the update is dropped.
  std::optional<EdgeUpdate> translate(const EdgeUpdate& e) const;

 private:
  PassSource& base_;
  const NodeHierarchy& nodes_;
  int k_;
};

struct ReductionResult {
  HopsetResult hopset;  // star edges plus center-to-center edges
  NodeHierarchy nodes;
};

// Hopset whose scales are built simultaneously on the node graphs. The
// reduction uses ε = ε′/24 for light thresholds; edges carry no paths.
ReductionResult aspect_ratio_reduce(PassSource& stream, double eps_prime, double kappa, double rho, double aspect,
                                    const HopsetConfig& config, const HopsetOverrides& overrides = {});

}  // namespace dgs
