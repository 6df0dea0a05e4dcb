#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dgs/hashing.hpp"

namespace dgs {

struct Point {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const Point&) const = default;
  auto operator<=>(const Point&) const = default;
};

// Raised when a sketch state can only have come from a negative final
// coordinate.
class TurnstileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when two independent recoveries disagree on a coordinate value.
class CorruptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strict convex hull (collinear points dropped), counter-clockwise.
std::vector<Point> convex_hull(std::vector<Point> points);

// Extreme points of the integer disc of radius R, clockwise from (R, 0).
std::vector<Point> disc_hull_vertices(std::int64_t radius);

// ν(1..n): n vertices of the lattice-disc hull, a convexly independent set.
class CisCodebook {
 public:
  static CisCodebook build(std::uint32_t n);
  static CisCodebook load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::uint32_t size() const { return static_cast<std::uint32_t>(points_.size()); }
  std::int64_t radius() const { return radius_; }
  const std::vector<Point>& points() const { return points_; }

  // 1-based.
  const Point& operator[](std::uint32_t i) const { return points_[i - 1]; }
  const Point& at(std::uint32_t i) const;

  // 1-based index of `p`, or 0 if `p` is not a codeword.
  std::uint32_t index_of(const Point& p) const;

  // If sum / count is exactly a codeword, its index; otherwise 0.
  std::uint32_t decode(std::int64_t sum_x, std::int64_t sum_y, std::int64_t count) const;

 private:
  CisCodebook(std::int64_t radius, std::vector<Point> points);
  void index_points();

  std::int64_t radius_ = 0;
  std::vector<Point> points_;
  // Hull vertices share no x within each half, so two dense arrays suffice
  // for moderate radii.
  std::vector<std::uint32_t> upper_;
  std::vector<std::uint32_t> lower_;
  std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
};

// Shared, lazily built codebook per n. When a cache directory is set, the
// codebook is read from / written to a binary sidecar there.
std::shared_ptr<const CisCodebook> codebook_for(std::uint32_t n);
void set_codebook_cache_dir(const std::filesystem::path& dir);

struct OneSparseSketch {
  std::int64_t lx = 0;
  std::int64_t ly = 0;
  std::int64_t ctr = 0;

  void update(const CisCodebook& cb, std::uint32_t i, std::int64_t delta);
  void merge(const OneSparseSketch& other);
  bool operator==(const OneSparseSketch&) const = default;
};

struct OneSparseResult {
  enum class Kind { Empty, One, Dense };
  Kind kind = Kind::Empty;
  std::uint32_t index = 0;
  std::int64_t value = 0;
};

OneSparseResult one_sparse_recover(const OneSparseSketch& sk, const CisCodebook& cb);

struct CoordinateUpdate {
  std::uint32_t index;
  std::int64_t delta;
};

using SparseVector = std::vector<std::pair<std::uint32_t, std::int64_t>>;

// 2s buckets × ⌈log2(s/δ)⌉ rows of 1-sparse sketches.
class SparseRecovery {
 public:
  SparseRecovery(std::shared_ptr<const CisCodebook> cb, std::size_t s, double delta, std::uint64_t seed);

  void update(std::uint32_t i, std::int64_t delta);
  void merge(const SparseRecovery& other);
  // Sorted by coordinate; nullopt when the vector is not s-sparse or could
  // not be certified complete.
  std::optional<SparseVector> recover() const;

  std::size_t rows() const { return rows_; }
  std::size_t buckets() const { return buckets_; }

 private:
  std::shared_ptr<const CisCodebook> cb_;
  std::size_t s_;
  std::size_t rows_;
  std::size_t buckets_;
  std::vector<PairwiseHash> hashes_;
  std::vector<OneSparseSketch> cells_;
};

std::optional<SparseVector> s_sparse_recover(std::span<const CoordinateUpdate> updates, std::size_t s, double delta,
                                             std::shared_ptr<const CisCodebook> cb, std::uint64_t seed);

struct L0Result {
  enum class Kind { Empty, Found, Failed };
  Kind kind = Kind::Empty;
  std::uint32_t index = 0;
  std::int64_t value = 0;
};

// r repetitions × (λ+1) scales; coordinate i is in scale j of repetition t
// iff h_{t,j}(i) <= 2^{λ-j}.
class L0Sampler {
 public:
  L0Sampler(std::shared_ptr<const CisCodebook> cb, double delta, std::uint64_t seed);

  static std::size_t repetitions_for(double delta);

  void update(std::uint32_t i, std::int64_t delta);
  void merge(const L0Sampler& other);
  L0Result sample() const;
  // Recovery restricted to one repetition and scale.
  OneSparseResult probe(std::size_t repetition, int scale) const;

  int lambda() const { return lambda_; }
  std::size_t repetitions() const { return reps_; }

 private:
  std::shared_ptr<const CisCodebook> cb_;
  int lambda_;
  std::size_t reps_;
  std::vector<PairwiseHash> hashes_;
  std::vector<OneSparseSketch> sketches_;
};

L0Result l0_sample(std::span<const CoordinateUpdate> updates, double delta, std::shared_ptr<const CisCodebook> cb,
                   std::uint64_t seed);

}  // namespace dgs
