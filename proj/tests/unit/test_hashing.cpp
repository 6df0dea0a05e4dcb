#include <cmath>
#include <set>

#include "dgs/hashing.hpp"
#include "dgs/random.hpp"
#include "support.hpp"

using namespace dgs;

namespace {

// Fraction of seeds for which exactly one element of {1..s} hashes into
// [2^{λ-⌈log s⌉-1}].
double isolation_rate(std::uint64_t s, std::uint64_t n, std::size_t trials, std::uint64_t salt) {
  const int lambda = ceil_log2(n);
  const int k = lambda - ceil_log2(s) - 1;
  const std::uint64_t bound = std::uint64_t{1} << std::max(0, k);
  Rng rng(salt);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto h = PairwiseHash::sample(n, lambda, rng.next());
    std::size_t inside = 0;
    // A random s-subset of the domain.
    std::set<std::uint64_t> members;
    while (members.size() < s) members.insert(rng.between(1, n));
    for (auto x : members) inside += h(x) <= bound;
    hits += inside == 1;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace

TEST_CASE("primes") {
  CHECK(is_prime(2));
  CHECK(is_prime(1'000'003));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(1'000'001));
  CHECK(next_prime_above(64) == 67);
  CHECK(next_prime_above(67) == 71);
  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(1024) == 10);
  CHECK(ceil_log2(1025) == 11);
}

TEST_CASE("hash evaluation follows the formula") {
  const PairwiseHash h(67, 1, 0, 3, 8);
  CHECK(h(5) == 6);
  const PairwiseHash g(67, 10, 3, 4, 8);
  CHECK(g(7) == ((10 * 7 + 3) % 67) % 16 + 1);
  CHECK_THROWS_AS(h(9), std::out_of_range);
  CHECK_THROWS_AS(h(0), std::out_of_range);
  CHECK_THROWS_AS(PairwiseHash(67, 0, 0, 3, 8), std::invalid_argument);
}

TEST_CASE("sampling is seeded") {
  const auto a = PairwiseHash::sample(1000, 5);
  const auto b = PairwiseHash::sample(1000, 5);
  CHECK(a == b);
  CHECK(a.p() == next_prime_above(1000 * 1000));
  CHECK(a.a() != 0);
  CHECK(a.lambda() == 10);
  std::set<std::pair<std::uint64_t, std::uint64_t>> distinct;
  for (std::uint64_t s = 0; s < 10'000; ++s) {
    const auto h = PairwiseHash::sample(1000, s);
    distinct.insert({h.a(), h.b()});
  }
  CHECK(distinct.size() >= 9'990);
}

TEST_CASE("outputs stay inside 1..2^lambda") {
  const auto h = PairwiseHash::sample(1 << 20, 12, 99);
  Rng rng(3);
  for (int i = 0; i < 100'000; ++i) {
    const auto y = h(rng.between(1, 1 << 20));
    REQUIRE(y >= 1);
    REQUIRE(y <= 4096);
  }
}

TEST_CASE("level is the first ladder level") {
  const auto h = PairwiseHash::sample(500, 7);
  for (std::uint64_t x = 1; x <= 500; ++x) {
    const auto y = h(x);
    const int l = h.level(x);
    CHECK(y <= (std::uint64_t{1} << l));
    if (l > 0) CHECK(y > (std::uint64_t{1} << (l - 1)));
  }
}

TEST_CASE("families are reproducible") {
  const auto f = sample_family(8, 100, 7, 5);
  const auto g = sample_family(8, 100, 7, 5);
  CHECK(f == g);
  const auto h = sample_family(8, 100, 7, 6);
  CHECK(f != h);
}

TEST_CASE("pairwise collision rate into a bucket") {
  const std::uint64_t n = 64;
  const int lambda = 6;
  const std::size_t trials = 40'000;
  for (int k : {2, 4}) {
    std::size_t both = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto h = PairwiseHash::sample(n, lambda, 1000 + t);
      both += h(3) <= (1u << k) && h(41) <= (1u << k);
    }
    const double expect = std::pow(std::ldexp(1.0, k - lambda), 2);
    const double sigma = std::sqrt(expect * (1 - expect) / trials);
    CHECK(std::abs(static_cast<double>(both) / trials - expect) <= 4 * sigma + 2.0 / (n * n));
  }
}

TEST_CASE("isolation of one element") {
  CHECK(isolation_rate(1, 1024, 20'000, 1) >= 1.0 / 8);
  const double rate = isolation_rate(16, 1024, 20'000, 2);
  const double sigma = std::sqrt(0.125 * 0.875 / 20'000);
  CHECK(rate >= 1.0 / 8 - 3 * sigma);
}

TEST_CASE("derived seeds separate tags") {
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) == derive_seed(1, {2}));
  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    const auto x = r.between(3, 9);
    REQUIRE(x >= 3);
    REQUIRE(x <= 9);
  }
}
