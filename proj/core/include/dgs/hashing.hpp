#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace dgs {

bool is_prime(std::uint64_t x);
// Smallest prime strictly greater than x.
std::uint64_t next_prime_above(std::uint64_t x);
// ⌈log2 x⌉ for x >= 1.
int ceil_log2(std::uint64_t x);

// h(x) = (((a·x + b) mod p) mod 2^λ) + 1 over the domain {1..domain}, with p
// the smallest prime above domain².
class PairwiseHash {
 public:
  PairwiseHash(std::uint64_t p, std::uint64_t a, std::uint64_t b, int lambda, std::uint64_t domain);

  static PairwiseHash sample(std::uint64_t domain, int lambda, std::uint64_t seed);
  // Domain {1..n}, λ = ⌈log2 n⌉.
  static PairwiseHash sample(std::uint64_t n, std::uint64_t seed);

  std::uint64_t p() const { return p_; }
  std::uint64_t a() const { return a_; }
  std::uint64_t b() const { return b_; }
  int lambda() const { return lambda_; }
  std::uint64_t domain() const { return domain_; }

  std::uint64_t operator()(std::uint64_t x) const {
    if (x < 1 || x > domain_) throw std::out_of_range("hash input outside [1, domain]");
    return eval_unchecked(x);
  }

  std::uint64_t eval_unchecked(std::uint64_t x) const {
    if (narrow_) return (((a_ * x + b_) % p_) & mask_) + 1;
    const unsigned __int128 t = static_cast<unsigned __int128>(a_) * x + b_;
    return (static_cast<std::uint64_t>(t % p_) & mask_) + 1;
  }

  // Smallest k with h(x) <= 2^k: the first ladder level the item lands in.
  int level(std::uint64_t x) const { return ceil_log2(eval_unchecked(x)); }

  bool operator==(const PairwiseHash& o) const {
    return p_ == o.p_ && a_ == o.a_ && b_ == o.b_ && lambda_ == o.lambda_ && domain_ == o.domain_;
  }

 private:
  std::uint64_t p_;
  std::uint64_t a_;
  std::uint64_t b_;
  int lambda_;
  std::uint64_t domain_;
  std::uint64_t mask_;
  // a·x + b fits in 64 bits for every input in the domain.
  bool narrow_;
};

// Independent hashes with seeds derived from `seed`.
std::vector<PairwiseHash> sample_family(std::size_t count, std::uint64_t domain, int lambda, std::uint64_t seed);

}  // namespace dgs
