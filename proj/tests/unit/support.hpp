#pragma once

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include "dgs/graph.hpp"
#include "dgs/stream.hpp"

namespace dgs::test {

// Inserts only, weight in whole units.
inline MultipassStream stream_of(Vertex n, const std::vector<std::tuple<Vertex, Vertex, std::int64_t>>& edges,
                                 bool weighted = true) {
  std::vector<EdgeUpdate> ups;
  for (const auto& [u, v, w] : edges) ups.push_back({u, v, +1, Weight::from_int(w), 0});
  return MultipassStream(n, weighted, std::move(ups));
}

inline MultipassStream unweighted_of(Vertex n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  std::vector<EdgeUpdate> ups;
  for (const auto& [u, v] : edges) ups.push_back({u, v, +1, Weight::from_int(1), 0});
  return MultipassStream(n, false, std::move(ups));
}

inline MultipassStream path_stream(Vertex n) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex v = 1; v < n; ++v) edges.emplace_back(v, v + 1);
  return unweighted_of(n, edges);
}

inline MultipassStream random_stream(Vertex n, std::size_t m, std::uint64_t seed, std::int64_t max_weight = 0,
                                     double churn = 1) {
  GeneratorOptions o;
  o.n = n;
  o.target_edges = m;
  o.churn = churn;
  o.seed = seed;
  o.weighted = max_weight > 0;
  o.max_weight = Weight::from_int(std::max<std::int64_t>(1, max_weight));
  return generate_stream(o);
}

// Scratch file removed when the object goes out of scope.
class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("dgs_unit_" + std::to_string(::getpid()) + "_" + name)) {}
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace dgs::test
