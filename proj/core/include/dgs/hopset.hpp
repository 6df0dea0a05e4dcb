#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dgs/explore.hpp"
#include "dgs/graph.hpp"
#include "dgs/stream.hpp"

namespace dgs {

// Replaces derived quantities of the schedule. The literal schedule makes
// β astronomically large for desk-sized inputs, which empties [k₀, k_λ].
struct HopsetOverrides {
  std::optional<double> phase_epsilon;  // ε used by the phase schedule
  std::optional<double> chi;            // error of every exploration
};

// (1 + a)(1 + b) - 1 without forming 1 + a, which loses the low bits of a.
double compound(double a, double b);

// ε_k for k = k₀ .. k_λ: 1 + ε_{k₀} = (1 + ε″)² and
// 1 + ε_k = (1 + ε″)²(1 + ε_{k-1}).
std::vector<double> epsilon_sequence(double eps2, int k0, int k_lambda);

struct HopsetParams {
  Vertex n = 0;
  double eps_prime = 0.5;
  double kappa = 2;
  double rho = 0.5;
  double aspect = 2;  // Λ
  int i0 = 0;
  int ell = 0;
  double eps2 = 0;  // ε″ = ε′ / (4 log Λ)
  double eps = 0;   // per-phase ε = ε″ / (16 c₅ ℓ)
  double chi = 0;
  double beta = 0;  // (1/ε)^ℓ
  int k0 = 0;
  int k_lambda = 0;
  int hops = 1;  // Bellman-Ford depth and sub-phase count, min(2β + 1, n - 1)
  std::vector<double> deg;
  std::vector<double> eps_k;  // indexed by k - k₀

  // ε_k, zero below k₀ where G^{(k)} is G itself.
  double eps_at(int k) const;
  double alpha(int k) const;
  double radius(int k, int i) const;
  double delta(int k, int i) const;
  // (1 + χ)(1 + ε_{k-1}) δ_i.
  double delta_prime(int k, int i) const;
  // (1 + ε″)^{2 log Λ}.
  double stretch_bound() const;
  bool has_scales() const { return k0 <= k_lambda; }
};

constexpr double kHopsetC5 = 2;

// κ must be >= 2 and ρ in [1/κ, 1/2]; Λ >= 2.
HopsetParams hopset_schedule(Vertex n, double eps_prime, double kappa, double rho, double aspect,
                             const HopsetOverrides& overrides = {});

struct HopsetConfig {
  double c1 = 3;
  double c1_prime = 3;
  double c4 = 2;
  std::uint64_t seed = 1;
  // Keep the implementing G path on every edge of the result.
  bool path_reporting = true;
};

// Largest tick count not above x (in weight units).
Distance floor_distance(double x);

struct ScaleOptions {
  // Offline edges of lower scales, relaxed after every pass.
  std::span<const HopsetEdge> lower;
  // Vertices taking part; empty means 1..n.
  std::vector<Vertex> vertices;
  // The stream is a derived multigraph: hash edges by origin and do not
  // build G paths.
  bool multigraph = false;
  // Lower end of every distance search.
  Distance min_weight = Weight::from_int(1);
};

struct ScaleStats {
  int scale = 0;
  std::size_t passes = 0;
  std::size_t retries = 0;
  std::size_t supercluster_edges = 0;
  std::size_t interconnection_edges = 0;
  std::size_t overflow = 0;
  std::vector<std::size_t> clusters;  // per phase
};

// H_k; empty when k < k₀.
std::vector<HopsetEdge> single_scale_hopset(PassSource& stream, int k, const HopsetParams& params,
                                            const HopsetConfig& config, const ScaleOptions& options = {},
                                            ScaleStats* stats = nullptr);

struct HopsetResult {
  std::vector<HopsetEdge> edges;
  HopsetParams params;
  std::vector<ScaleStats> scales;
  std::size_t passes = 0;
  std::size_t star_edges = 0;
};

// Scales k₀ .. k_λ one after another, each exploring G ∪ H^{(k-1)}.
HopsetResult multi_scale_hopset(PassSource& stream, double eps_prime, double kappa, double rho, double aspect,
                                const HopsetConfig& config, const HopsetOverrides& overrides = {});

// Concatenates the G paths of a parent chain; `via` entries index `lower`
// or are -1 for a stream edge.
std::vector<Vertex> expand_chain(const DistanceEstimates::Chain& chain, std::span<const HopsetEdge> lower);

}  // namespace dgs
