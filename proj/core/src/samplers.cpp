#include "dgs/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dgs {

template <class Slot>
std::vector<Slot> SlotBank<Slot>::ladder(std::size_t attempt) const {
  std::vector<Slot> out(levels_);
  Slot acc{};
  for (std::size_t k = 0; k < levels_; ++k) {
    const Slot& b = bucket(attempt, static_cast<int>(k));
    if constexpr (std::is_same_v<Slot, XorSlot>) {
      acc.count += b.count;
      acc.name ^= b.name;
    } else if constexpr (std::is_same_v<Slot, DistSlot>) {
      acc.count += b.count;
      acc.dist += b.dist;
      acc.name ^= b.name;
    } else {
      acc.count += b.count;
      acc.x += b.x;
      acc.y += b.y;
    }
    out[k] = acc;
  }
  return out;
}

template class SlotBank<XorSlot>;
template class SlotBank<DistSlot>;
template class SlotBank<CisSlot>;

// ---------------------------------------------------------------- levels

LevelTable::LevelTable(std::span<const PairwiseHash> hashes)
    : hashes_(hashes), lambda_(hashes.empty() ? 0 : hashes.front().lambda()) {}

void LevelTable::prepare(std::uint64_t item) {
  if (rows_.count(item) != 0) return;
  const std::size_t offset = data_.size();
  data_.resize(offset + hashes_.size());
  for (std::size_t a = 0; a < hashes_.size(); ++a) {
    data_[offset + a] = static_cast<std::uint8_t>(hashes_[a].level(item));
  }
  rows_.emplace(item, offset);
}

const std::uint8_t* LevelTable::row(std::uint64_t item) const {
  auto it = rows_.find(item);
  if (it == rows_.end()) throw std::logic_error("level table row was not prepared");
  return data_.data() + it->second;
}

// Because every final multiplicity is non-negative, counts never decrease
// going up the ladder and a level holding two distinct items keeps holding
// them. The first non-empty level is therefore the only level that can
// isolate an item, and the recoveries below only inspect that level.

// ---------------------------------------------------------------- parent

ParentSampler::ParentSampler(const LevelTable& levels)
    : levels_(&levels), bank_(levels.attempts(), levels.lambda()) {}

void ParentSampler::add(Vertex y, int sign) {
  const std::uint8_t* row = levels_->row(y);
  for (std::size_t a = 0; a < bank_.attempts(); ++a) {
    XorSlot& s = bank_.bucket(a, row[a]);
    s.count += sign;
    if (sign & 1) s.name ^= y;
  }
}

ParentOutcome ParentSampler::recover(std::size_t attempt, const NameCheck& valid) const {
  std::int64_t count = 0;
  std::uint64_t name = 0;
  for (int k = 0; k <= bank_.lambda(); ++k) {
    const XorSlot& b = bank_.bucket(attempt, k);
    count += b.count;
    name ^= b.name;
    if (count == 0) continue;
    if (count == 1 && name >= 1 && name <= 0xffffffffULL && valid(static_cast<Vertex>(name))) {
      return {Outcome::Found, static_cast<Vertex>(name)};
    }
    return {Outcome::Failed, kNoVertex};
  }
  return {name == 0 ? Outcome::Empty : Outcome::Failed, kNoVertex};
}

namespace {

template <class Sampler, class Check>
ParentOutcome first_parent(const Sampler& s, std::size_t attempts, const Check& valid) {
  bool failed = false;
  for (std::size_t a = 0; a < attempts; ++a) {
    const auto r = s.recover(a, valid);
    if (r.kind == Outcome::Found) return r;
    failed |= r.kind == Outcome::Failed;
  }
  return {failed ? Outcome::Failed : Outcome::Empty, kNoVertex};
}

}  // namespace

ParentOutcome ParentSampler::first_success(const NameCheck& valid) const {
  return first_parent(*this, bank_.attempts(), valid);
}

SingleSlotParentSampler::SingleSlotParentSampler(const LevelTable& levels, std::int64_t known_count)
    : levels_(&levels), slots_(levels.attempts()) {
  if (known_count < 1) throw std::invalid_argument("single-slot FindParent needs a positive count");
  level_ = std::clamp(levels.lambda() - ceil_log2(static_cast<std::uint64_t>(known_count)) - 1, 0, levels.lambda());
}

void SingleSlotParentSampler::add(Vertex y, int sign) {
  const std::uint8_t* row = levels_->row(y);
  for (std::size_t a = 0; a < slots_.size(); ++a) {
    if (row[a] > level_) continue;
    slots_[a].count += sign;
    if (sign & 1) slots_[a].name ^= y;
  }
}

ParentOutcome SingleSlotParentSampler::recover(std::size_t attempt, const NameCheck& valid) const {
  const XorSlot& s = slots_[attempt];
  if (s.count == 1 && s.name >= 1 && s.name <= 0xffffffffULL && valid(static_cast<Vertex>(s.name))) {
    return {Outcome::Found, static_cast<Vertex>(s.name)};
  }
  return {Outcome::Failed, kNoVertex};
}

ParentOutcome SingleSlotParentSampler::first_success(const NameCheck& valid) const {
  return first_parent(*this, slots_.size(), valid);
}

// ---------------------------------------------------------------- distance

DistanceSampler::DistanceSampler(std::span<const PairwiseHash> hashes, const LevelTable* levels)
    : hashes_(hashes),
      levels_(levels),
      bank_(hashes.size(), hashes.empty() ? 0 : hashes.front().lambda()),
      scratch_(levels ? 0 : hashes.size()) {}

void DistanceSampler::add(std::uint64_t key, Vertex y, Distance value, int sign) {
  const std::uint8_t* row;
  if (levels_ != nullptr) {
    row = levels_->row(key);
  } else {
    for (std::size_t a = 0; a < hashes_.size(); ++a) scratch_[a] = static_cast<std::uint8_t>(hashes_[a].level(key));
    row = scratch_.data();
  }
  const std::int64_t t = value.ticks() * sign;
  for (std::size_t a = 0; a < bank_.attempts(); ++a) {
    DistSlot& s = bank_.bucket(a, row[a]);
    s.count += sign;
    s.dist += t;
    if (sign & 1) s.name ^= y;
  }
}

DistanceOutcome DistanceSampler::recover(std::size_t attempt, const DistanceCheck& valid) const {
  std::int64_t count = 0;
  std::int64_t dist = 0;
  std::uint64_t name = 0;
  for (int k = 0; k <= bank_.lambda(); ++k) {
    const DistSlot& b = bank_.bucket(attempt, k);
    count += b.count;
    dist += b.dist;
    name ^= b.name;
    if (count == 0) continue;
    if (count == 1 && name >= 1 && name <= 0xffffffffULL && dist >= 0) {
      const Distance d = Distance::from_ticks(dist);
      if (valid(static_cast<Vertex>(name), d)) return {Outcome::Found, d, static_cast<Vertex>(name), 0};
    }
    return {Outcome::Failed, Distance::infinity(), kNoVertex, 0};
  }
  if (name != 0 || dist != 0) return {Outcome::Failed, Distance::infinity(), kNoVertex, 0};
  return {};
}

DistanceOutcome DistanceSampler::best(const DistanceCheck& valid) const {
  DistanceOutcome best_found;
  bool failed = false;
  bool found = false;
  for (std::size_t a = 0; a < bank_.attempts(); ++a) {
    const auto r = recover(a, valid);
    if (r.kind == Outcome::Found) {
      if (!found || r.dist < best_found.dist || (r.dist == best_found.dist && r.parent < best_found.parent)) {
        best_found = r;
      }
      found = true;
    }
    failed |= r.kind == Outcome::Failed;
  }
  if (found) return best_found;
  DistanceOutcome out;
  out.kind = failed ? Outcome::Failed : Outcome::Empty;
  return out;
}

// ---------------------------------------------------------------- sources

SourceSampler::SourceSampler(const LevelTable& levels, const CisCodebook& cb)
    : levels_(&levels), cb_(&cb), bank_(levels.attempts(), levels.lambda()) {}

void SourceSampler::add(Vertex s, int sign) {
  const Point& p = (*cb_)[s];
  const std::uint8_t* row = levels_->row(s);
  const std::int64_t px = p.x * sign;
  const std::int64_t py = p.y * sign;
  for (std::size_t a = 0; a < bank_.attempts(); ++a) {
    CisSlot& slot = bank_.bucket(a, row[a]);
    slot.count += sign;
    slot.x += px;
    slot.y += py;
  }
}

SourceOutcome SourceSampler::recover(std::size_t attempt) const {
  std::int64_t count = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;
  for (int k = 0; k <= bank_.lambda(); ++k) {
    const CisSlot& b = bank_.bucket(attempt, k);
    count += b.count;
    x += b.x;
    y += b.y;
    if (count == 0) continue;
    const std::uint32_t s = cb_->decode(x, y, count);
    if (s != 0) return {Outcome::Found, s, count};
    return {Outcome::Failed, kNoVertex, 0};
  }
  if (x != 0 || y != 0) return {Outcome::Failed, kNoVertex, 0};
  return {};
}

SourceHarvest SourceSampler::harvest() const {
  SourceHarvest h;
  for (std::size_t a = 0; a < bank_.attempts(); ++a) {
    const auto r = recover(a);
    if (r.kind == Outcome::Empty) continue;
    h.empty = false;
    if (r.kind == Outcome::Failed) {
      h.any_failed = true;
      continue;
    }
    auto [it, inserted] = h.found.emplace(r.source, r.count);
    if (!inserted && it->second != r.count) {
      throw CorruptionError("attempts disagree on the candidate count of source " + std::to_string(r.source));
    }
  }
  if (bank_.attempts() > 0) {
    std::int64_t count = 0;
    std::int64_t x = 0;
    std::int64_t y = 0;
    for (int k = 0; k <= bank_.lambda(); ++k) {
      const CisSlot& b = bank_.bucket(0, k);
      count += b.count;
      x += b.x;
      y += b.y;
    }
    for (const auto& [s, c] : h.found) {
      const Point& p = (*cb_)[s];
      count -= c;
      x -= p.x * c;
      y -= p.y * c;
    }
    h.complete = count == 0 && x == 0 && y == 0;
  }
  return h;
}

// ---------------------------------------------------------------- ranges

RangeLadder::RangeLadder(Distance low, Distance high, double zeta_prime) : zeta_prime_(zeta_prime) {
  if (!(zeta_prime > 0)) throw std::invalid_argument("sub-range ratio must be positive");
  if (low.ticks() <= 0 || !(high >= low) || high.is_infinite()) throw std::invalid_argument("bad search range");
  const auto lo = static_cast<double>(low.ticks());
  const auto hi = static_cast<double>(high.ticks());
  const double steps = std::ceil(std::log(hi / lo) / std::log1p(zeta_prime));
  const auto count = static_cast<std::size_t>(std::max(1.0, steps));
  bounds_.reserve(count + 1);
  for (std::size_t j = 0; j <= count; ++j) bounds_.push_back(lo * std::pow(1.0 + zeta_prime, static_cast<double>(j)));
  while (bounds_.back() < hi) bounds_.push_back(lo * std::pow(1.0 + zeta_prime, static_cast<double>(bounds_.size())));
}

int RangeLadder::index_of(Distance d) const {
  if (d.is_infinite()) return -1;
  const auto t = static_cast<double>(d.ticks());
  if (t < bounds_.front() || t > bounds_.back()) return -1;
  if (t <= bounds_[1]) return 0;
  const auto it = std::lower_bound(bounds_.begin(), bounds_.end(), t);
  return static_cast<int>(it - bounds_.begin()) - 1;
}

DistanceRange RangeLadder::range(std::size_t j) const {
  return {bounds_.at(j), bounds_.at(j + 1), j == 0};
}

// ---------------------------------------------------------------- single invocations

namespace {

Vertex other_end(const EdgeUpdate& e, Vertex v) { return e.u == v ? e.v : e.u; }

}  // namespace

ParentOutcome find_parent(Vertex v, const PairwiseHash& h, std::span<const EdgeUpdate> pass,
                          const std::vector<std::uint8_t>& in_frontier) {
  LevelTable table(std::span<const PairwiseHash>(&h, 1));
  ParentSampler sampler(table);
  for (const auto& e : pass) {
    if (e.u != v && e.v != v) continue;
    const Vertex y = other_end(e, v);
    if (!in_frontier[y]) continue;
    table.prepare(y);
    sampler.add(y, e.sign);
  }
  return sampler.recover(0, [&](Vertex y) { return y < in_frontier.size() && in_frontier[y] != 0; });
}

DistanceOutcome guess_distance(Vertex v, const PairwiseHash& h, const DistanceRange& range,
                               std::span<const EdgeUpdate> pass, const std::vector<Distance>& dhat) {
  DistanceSampler sampler(std::span<const PairwiseHash>(&h, 1), nullptr);
  for (const auto& e : pass) {
    if (e.u != v && e.v != v) continue;
    const Vertex y = other_end(e, v);
    if (dhat[y].is_infinite()) continue;
    const Distance value = dhat[y] + e.weight;
    if (!range.contains(value)) continue;
    sampler.add(y, y, value, e.sign);
  }
  return sampler.recover(0, [&](Vertex y, Distance d) {
    return y < dhat.size() && dhat[y].is_finite() && range.contains(d) && d > dhat[y];
  });
}

SourceOutcome find_new_visitor(Vertex v, const PairwiseHash& h, const CisCodebook& cb,
                               std::span<const EdgeUpdate> pass, const std::vector<std::vector<Vertex>>& lists) {
  LevelTable table(std::span<const PairwiseHash>(&h, 1));
  SourceSampler sampler(table, cb);
  const std::set<Vertex> mine(lists[v].begin(), lists[v].end());
  for (const auto& e : pass) {
    if (e.u != v && e.v != v) continue;
    const Vertex u = other_end(e, v);
    for (Vertex s : lists[u]) {
      if (mine.count(s) != 0) continue;
      table.prepare(s);
      sampler.add(s, e.sign);
    }
  }
  return sampler.recover(0);
}

SourceOutcome find_new_candidate(Vertex v, const PairwiseHash& h, const CisCodebook& cb, const DistanceRange& range,
                                 std::span<const EdgeUpdate> pass,
                                 const std::vector<std::map<Vertex, Distance>>& estimates) {
  LevelTable table(std::span<const PairwiseHash>(&h, 1));
  SourceSampler sampler(table, cb);
  for (const auto& e : pass) {
    if (e.u != v && e.v != v) continue;
    const Vertex u = other_end(e, v);
    for (const auto& [s, du] : estimates[u]) {
      const Distance value = du + e.weight;
      if (!range.contains(value)) continue;
      auto mine = estimates[v].find(s);
      if (mine != estimates[v].end() && !(value < mine->second)) continue;
      table.prepare(s);
      sampler.add(s, e.sign);
    }
  }
  return sampler.recover(0);
}

}  // namespace dgs
