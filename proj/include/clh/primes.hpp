#pragma once

// Prime plumbing: sieve, primality by trial division, and small-scale
// factorization. Inputs here are desk-scale; nothing clever is needed.

#include "clh/rational.hpp"

#include <cstdint>
#include <vector>

namespace clh {

inline constexpr std::uint64_t kSieveCap = 100'000'000;
inline constexpr std::uint64_t kFactorCap = 1'000'000'000;

inline std::vector<std::uint64_t> primes_up_to(std::uint64_t x) {
  if (x > kSieveCap)
    throw budget_error("primes_up_to: cutoff " + std::to_string(x) + " exceeds sieve cap");
  std::vector<bool> composite(x + 1, false);
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 2; n <= x; ++n) {
    if (composite[n]) continue;
    out.push_back(n);
    for (std::uint64_t m = n * n; m <= x; m += n) composite[m] = true;
  }
  return out;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
};

// Trial division; refuses inputs beyond the documented cap.
inline std::vector<PrimePower> factorize(std::uint64_t n, std::uint64_t cap = kFactorCap) {
  if (n < 1) throw std::invalid_argument("factorize: n must be positive");
  if (n > cap)
    throw budget_error("factorize: " + std::to_string(n) + " exceeds factorization cap " +
                       std::to_string(cap));
  std::vector<PrimePower> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    out.push_back({d, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline unsigned prime_valuation(std::uint64_t n, std::uint64_t p) {
  unsigned v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

}  // namespace clh
