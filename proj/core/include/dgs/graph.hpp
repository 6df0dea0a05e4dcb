#pragma once

#include <cstdint>
#include <filesystem>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dgs/stream.hpp"
#include "dgs/weight.hpp"

namespace dgs {

struct Edge {
  Vertex u = kNoVertex;
  Vertex v = kNoVertex;
  Weight w = Weight::from_int(1);
  bool operator==(const Edge&) const = default;
};

// Final simple graph of a stream, materialized offline.
class Graph {
 public:
  Graph() = default;
  Graph(Vertex n, const std::vector<Edge>& edges);

  Vertex n() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  // Sorted by (min endpoint, max endpoint), u < v.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::pair<Vertex, Weight>>& neighbors(Vertex v) const { return adj_[v]; }
  std::size_t degree(Vertex v) const { return adj_[v].size(); }
  bool has_edge(Vertex u, Vertex v) const { return index_.count(edge_name(u, v)) != 0; }
  // Infinite when absent.
  Weight weight(Vertex u, Vertex v) const;

 private:
  Vertex n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<Vertex, Weight>>> adj_;
  std::unordered_map<std::uint64_t, Weight> index_;
};

// One pass; edges whose final multiplicity is 1.
Graph materialize(PassSource& stream);
// Offline view of an in-memory stream; not a pass.
Graph final_graph(const MultipassStream& stream);

// Extra weighted edge, optionally carrying a G path v₁ … v_m that implements
// it (v₁ = u, v_m = v).
struct HopsetEdge {
  Vertex u = kNoVertex;
  Vertex v = kNoVertex;
  Weight w;
  int scale = 0;
  std::vector<Vertex> path;
  bool operator==(const HopsetEdge&) const = default;
};

void save_edges(const std::vector<Edge>& edges, Vertex n, const std::filesystem::path& path);
std::pair<Vertex, std::vector<Edge>> load_edges(const std::filesystem::path& path);

// `u v w k [path: v1 ... vm]` per line.
void save_hopset(const std::vector<HopsetEdge>& edges, const std::filesystem::path& path);
std::vector<HopsetEdge> load_hopset(const std::filesystem::path& path);

}  // namespace dgs
