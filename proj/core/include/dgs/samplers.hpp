#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "dgs/encoding.hpp"
#include "dgs/hashing.hpp"
#include "dgs/stream.hpp"
#include "dgs/weight.hpp"

namespace dgs {

struct XorSlot {
  std::int64_t count = 0;
  std::uint64_t name = 0;
  bool operator==(const XorSlot&) const = default;
};

struct DistSlot {
  std::int64_t count = 0;
  std::int64_t dist = 0;  // sum of Distance ticks
  std::uint64_t name = 0;
  bool operator==(const DistSlot&) const = default;
};

struct CisSlot {
  std::int64_t count = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool operator==(const CisSlot&) const = default;
};

// One λ+1 level ladder per attempt. Level k aggregates every item whose
// hash value is at most 2^k. Storage keeps each item only at its first
// level and ladder() forms the prefix sums, which is the same linear map.
// Storage is level-major so that one item update walks the attempts in
// order.
template <class Slot>
class SlotBank {
 public:
  SlotBank() = default;
  SlotBank(std::size_t attempts, int lambda)
      : attempts_(attempts), levels_(static_cast<std::size_t>(lambda) + 1), data_(attempts * levels_) {}

  std::size_t attempts() const { return attempts_; }
  int lambda() const { return static_cast<int>(levels_) - 1; }
  Slot& bucket(std::size_t attempt, int level) { return data_[static_cast<std::size_t>(level) * attempts_ + attempt]; }
  const Slot& bucket(std::size_t attempt, int level) const {
    return data_[static_cast<std::size_t>(level) * attempts_ + attempt];
  }
  std::vector<Slot> ladder(std::size_t attempt) const;
  std::size_t bytes() const { return data_.size() * sizeof(Slot); }
  bool operator==(const SlotBank&) const = default;

 private:
  std::size_t attempts_ = 0;
  std::size_t levels_ = 0;
  std::vector<Slot> data_;
};

// Levels of a fixed item set under a fixed hash family, computed once.
class LevelTable {
 public:
  explicit LevelTable(std::span<const PairwiseHash> hashes);

  void prepare(std::uint64_t item);
  bool has(std::uint64_t item) const { return rows_.count(item) != 0; }
  const std::uint8_t* row(std::uint64_t item) const;
  std::size_t attempts() const { return hashes_.size(); }
  int lambda() const { return lambda_; }
  std::span<const PairwiseHash> hashes() const { return hashes_; }

 private:
  std::span<const PairwiseHash> hashes_;
  int lambda_;
  std::unordered_map<std::uint64_t, std::size_t> rows_;
  std::vector<std::uint8_t> data_;
};

enum class Outcome { Empty, Found, Failed };

struct ParentOutcome {
  Outcome kind = Outcome::Empty;
  Vertex parent = kNoVertex;
};

using NameCheck = std::function<bool(Vertex)>;

// FindParent bank: one invocation per hash of the table.
class ParentSampler {
 public:
  explicit ParentSampler(const LevelTable& levels);
  void add(Vertex y, int sign);
  ParentOutcome recover(std::size_t attempt, const NameCheck& valid) const;
  // Lowest-index success; Empty if every attempt saw nothing.
  ParentOutcome first_success(const NameCheck& valid) const;
  std::size_t bytes() const { return bank_.bytes(); }
  const SlotBank<XorSlot>& bank() const { return bank_; }

 private:
  const LevelTable* levels_;
  SlotBank<XorSlot> bank_;
};

// FindParent with a known candidate count k: each attempt keeps only the
// slot at level λ - ⌈log2 k⌉ - 1.
class SingleSlotParentSampler {
 public:
  SingleSlotParentSampler(const LevelTable& levels, std::int64_t known_count);
  void add(Vertex y, int sign);
  ParentOutcome recover(std::size_t attempt, const NameCheck& valid) const;
  ParentOutcome first_success(const NameCheck& valid) const;
  int level() const { return level_; }
  std::size_t bytes() const { return slots_.size() * sizeof(XorSlot); }

 private:
  const LevelTable* levels_;
  int level_;
  std::vector<XorSlot> slots_;
};

struct DistanceOutcome {
  Outcome kind = Outcome::Empty;
  Distance dist = Distance::infinity();
  Vertex parent = kNoVertex;
  std::uint64_t key = 0;
};

using DistanceCheck = std::function<bool(Vertex, Distance)>;

// GuessDistance bank. Items are hashed by `key`: the neighbour id in simple
// graphs or the underlying edge identity in derived multigraphs.
class DistanceSampler {
 public:
  DistanceSampler(std::span<const PairwiseHash> hashes, const LevelTable* levels);
  void add(std::uint64_t key, Vertex y, Distance value, int sign);
  DistanceOutcome recover(std::size_t attempt, const DistanceCheck& valid) const;
  // Smallest dist among successful attempts.
  DistanceOutcome best(const DistanceCheck& valid) const;
  std::size_t bytes() const { return bank_.bytes(); }
  const SlotBank<DistSlot>& bank() const { return bank_; }

 private:
  std::span<const PairwiseHash> hashes_;
  const LevelTable* levels_;
  SlotBank<DistSlot> bank_;
  std::vector<std::uint8_t> scratch_;
};

struct SourceOutcome {
  Outcome kind = Outcome::Empty;
  Vertex source = kNoVertex;
  std::int64_t count = 0;
};

struct SourceHarvest {
  std::map<Vertex, std::int64_t> found;  // source -> candidate count
  bool empty = true;
  bool any_failed = false;
  // The level-λ sums match the harvested sources exactly, so no candidate
  // was missed.
  bool complete = true;
};

// FindNewVisitor and FindNewCandidate bank over CIS-encoded source names.
class SourceSampler {
 public:
  SourceSampler(const LevelTable& levels, const CisCodebook& cb);
  void add(Vertex s, int sign);
  SourceOutcome recover(std::size_t attempt) const;
  SourceHarvest harvest() const;
  std::size_t bytes() const { return bank_.bytes(); }
  const SlotBank<CisSlot>& bank() const { return bank_; }

 private:
  const LevelTable* levels_;
  const CisCodebook* cb_;
  SlotBank<CisSlot> bank_;
};

// A sub-range of distances; the lower end is open unless `closed_low`.
struct DistanceRange {
  double low = 0;   // ticks
  double high = 0;  // ticks
  bool closed_low = false;
  bool contains(Distance d) const {
    const auto t = static_cast<double>(d.ticks());
    return (closed_low ? t >= low : t > low) && t <= high;
  }
};

// [low, low(1+ζ′)] followed by (low(1+ζ′)^j, low(1+ζ′)^{j+1}] up to the
// first bound >= high.
class RangeLadder {
 public:
  RangeLadder(Distance low, Distance high, double zeta_prime);
  // -1 when d falls outside every sub-range.
  int index_of(Distance d) const;
  std::size_t size() const { return bounds_.size() - 1; }
  DistanceRange range(std::size_t j) const;
  double zeta_prime() const { return zeta_prime_; }

 private:
  double zeta_prime_;
  std::vector<double> bounds_;  // ticks
};

// Single-invocation forms over one pass worth of updates.
ParentOutcome find_parent(Vertex v, const PairwiseHash& h, std::span<const EdgeUpdate> pass,
                          const std::vector<std::uint8_t>& in_frontier);
DistanceOutcome guess_distance(Vertex v, const PairwiseHash& h, const DistanceRange& range,
                               std::span<const EdgeUpdate> pass, const std::vector<Distance>& dhat);
SourceOutcome find_new_visitor(Vertex v, const PairwiseHash& h, const CisCodebook& cb,
                               std::span<const EdgeUpdate> pass, const std::vector<std::vector<Vertex>>& lists);
SourceOutcome find_new_candidate(Vertex v, const PairwiseHash& h, const CisCodebook& cb, const DistanceRange& range,
                                 std::span<const EdgeUpdate> pass,
                                 const std::vector<std::map<Vertex, Distance>>& estimates);

}  // namespace dgs
