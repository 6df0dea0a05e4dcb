#include "dgs/weight.hpp"

#include <cmath>
#include <stdexcept>

namespace dgs {

Weight Weight::ceil_of(double value) {
  if (!(value >= 0.0)) throw std::invalid_argument("weight must be non-negative");
  const double scaled = value * static_cast<double>(kScale);
  if (scaled >= 9.0e18) throw std::out_of_range("weight too large");
  return Weight(static_cast<std::int64_t>(std::ceil(scaled - 1e-9)));
}

Weight Weight::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty weight");
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("malformed weight: " + std::string(text));
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw std::invalid_argument("malformed weight: " + std::string(text));
    seen_digit = true;
    const int d = c - '0';
    if (!seen_dot) {
      if (whole > (std::numeric_limits<std::int64_t>::max() / kScale - 9) / 10) {
        throw std::out_of_range("weight too large: " + std::string(text));
      }
      whole = whole * 10 + d;
    } else {
      if (frac_digits == kDecimals) {
        if (d != 0) throw std::invalid_argument("weight has more than 6 decimals: " + std::string(text));
        continue;
      }
      frac = frac * 10 + d;
      ++frac_digits;
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed weight: " + std::string(text));
  for (int i = frac_digits; i < kDecimals; ++i) frac *= 10;
  return Weight(whole * kScale + frac);
}

double Weight::to_double() const {
  if (is_infinite()) return std::numeric_limits<double>::infinity();
  return static_cast<double>(ticks_) / static_cast<double>(kScale);
}

std::string Weight::to_string() const {
  if (is_infinite()) return "inf";
  std::int64_t t = ticks_;
  std::string sign;
  if (t < 0) {
    sign = "-";
    t = -t;
  }
  std::string out = sign + std::to_string(t / kScale);
  std::int64_t frac = t % kScale;
  if (frac == 0) return out;
  std::string digits = std::to_string(frac);
  digits.insert(0, static_cast<std::size_t>(kDecimals) - digits.size(), '0');
  while (!digits.empty() && digits.back() == '0') digits.pop_back();
  return out + "." + digits;
}

}  // namespace dgs
