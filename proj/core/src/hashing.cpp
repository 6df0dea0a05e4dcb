#include "dgs/hashing.hpp"

#include <map>
#include <mutex>

#include "dgs/random.hpp"

namespace dgs {

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

}  // namespace

bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (x % p == 0) return x == p;
  }
  std::uint64_t d = x - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // These witnesses are deterministic for every 64-bit input.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t y = powmod(a, d, x);
    if (y == 1 || y == x - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      y = mulmod(y, y, x);
      if (y == x - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime_above(std::uint64_t x) {
  std::uint64_t c = x + 1;
  while (!is_prime(c)) ++c;
  return c;
}

int ceil_log2(std::uint64_t x) {
  if (x <= 1) return 0;
  return 64 - __builtin_clzll(x - 1);
}

PairwiseHash::PairwiseHash(std::uint64_t p, std::uint64_t a, std::uint64_t b, int lambda, std::uint64_t domain)
    : p_(p), a_(a), b_(b), lambda_(lambda), domain_(domain) {
  if (p < 2) throw std::invalid_argument("hash modulus must be >= 2");
  if (a < 1 || a >= p) throw std::invalid_argument("hash multiplier must lie in [1, p-1]");
  if (b >= p) throw std::invalid_argument("hash offset must lie in [0, p-1]");
  if (lambda < 0 || lambda > 62) throw std::invalid_argument("hash output exponent out of range");
  if (domain < 1) throw std::invalid_argument("hash domain must be non-empty");
  mask_ = (std::uint64_t{1} << lambda) - 1;
  narrow_ = p < (std::uint64_t{1} << 32) && domain < (std::uint64_t{1} << 31);
}

namespace {

std::uint64_t modulus_for(std::uint64_t domain) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::uint64_t> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(domain);
  if (it != cache.end()) return it->second;
  const unsigned __int128 sq = static_cast<unsigned __int128>(domain) * domain;
  if (sq > (static_cast<unsigned __int128>(1) << 62)) throw std::out_of_range("hash domain too large");
  const std::uint64_t p = next_prime_above(static_cast<std::uint64_t>(sq));
  cache.emplace(domain, p);
  return p;
}

}  // namespace

namespace {

PairwiseHash draw_hash(Rng& rng, std::uint64_t p, std::uint64_t domain, int lambda) {
  const std::uint64_t a = rng.between(1, p - 1);
  const std::uint64_t b = rng.below(p);
  return PairwiseHash(p, a, b, lambda, domain);
}

}  // namespace

PairwiseHash PairwiseHash::sample(std::uint64_t domain, int lambda, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x68617368ULL}));
  return draw_hash(rng, modulus_for(domain), domain, lambda);
}

PairwiseHash PairwiseHash::sample(std::uint64_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_hash needs n >= 2");
  return sample(n, ceil_log2(n), seed);
}

std::vector<PairwiseHash> sample_family(std::size_t count, std::uint64_t domain, int lambda, std::uint64_t seed) {
  std::vector<PairwiseHash> family;
  family.reserve(count);
  // One generator for the whole family; seeding a fresh engine per member
  // dominates the cost of large families.
  Rng rng(derive_seed(seed, {0x66616d69ULL}));
  const std::uint64_t p = modulus_for(domain);
  for (std::size_t i = 0; i < count; ++i) family.push_back(draw_hash(rng, p, domain, lambda));
  return family;
}

}  // namespace dgs
