#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace dgs {

using Vertex = std::uint32_t;
inline constexpr Vertex kNoVertex = 0;

// Exact decimal quantity stored as a count of 10^-6 units. Sums of weights
// must be exactly invertible inside linear sketches, which rules out
// binary floating point.
class Weight {
 public:
  static constexpr std::int64_t kScale = 1'000'000;
  static constexpr int kDecimals = 6;

  constexpr Weight() = default;

  static constexpr Weight from_ticks(std::int64_t ticks) { return Weight(ticks); }
  static constexpr Weight from_int(std::int64_t value) { return Weight(value * kScale); }
  static constexpr Weight infinity() { return Weight(kInfinite); }
  static constexpr Weight zero() { return Weight(0); }
  // Smallest representable weight >= value.
  static Weight ceil_of(double value);
  // Parses a non-negative decimal literal such as "2", "2.5" or "0.125".
  static Weight parse(std::string_view text);

  constexpr std::int64_t ticks() const { return ticks_; }
  constexpr bool is_infinite() const { return ticks_ == kInfinite; }
  constexpr bool is_finite() const { return ticks_ != kInfinite; }
  double to_double() const;
  std::string to_string() const;

  constexpr auto operator<=>(const Weight&) const = default;

  // Saturating at infinity.
  constexpr Weight operator+(Weight other) const {
    if (is_infinite() || other.is_infinite()) return infinity();
    return Weight(ticks_ + other.ticks_);
  }
  constexpr Weight operator-(Weight other) const { return Weight(ticks_ - other.ticks_); }
  constexpr Weight& operator+=(Weight other) { return *this = *this + other; }

 private:
  static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();
  constexpr explicit Weight(std::int64_t ticks) : ticks_(ticks) {}

  std::int64_t ticks_ = 0;
};

using Distance = Weight;

// Stable identity of an unordered vertex pair in [1, n^2].
inline constexpr std::uint64_t pair_index(Vertex u, Vertex v, Vertex n) {
  const Vertex lo = u < v ? u : v;
  const Vertex hi = u < v ? v : u;
  return static_cast<std::uint64_t>(lo - 1) * n + hi;
}

// Binary edge name: smaller endpoint in the high word.
inline constexpr std::uint64_t edge_name(Vertex u, Vertex v) {
  const Vertex lo = u < v ? u : v;
  const Vertex hi = u < v ? v : u;
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

inline constexpr Vertex edge_name_low(std::uint64_t name) { return static_cast<Vertex>(name >> 32); }
inline constexpr Vertex edge_name_high(std::uint64_t name) {
  return static_cast<Vertex>(name & 0xffffffffu);
}

}  // namespace dgs
