#pragma once

// The local Cohen-Lenstra measure on partitions at a fixed prime p:
// weights w(lambda) = 1/#Aut, the normalizer eta(p) = prod_{i>=1}(1-p^-i),
// and fiber probabilities P_p(E) = w(fiber) * eta(p), all as exact rational
// enclosures. Tails of the infinite sums and products are covered by
// closed-form rational bounds.

#include "clh/abelian.hpp"
#include "clh/enclosure.hpp"
#include "clh/properties.hpp"

#include <algorithm>
#include <cstdint>

namespace clh {

inline Rat weight(std::uint64_t p, const Partition& lam) {
  return make_rat(Int(1), aut_order(p, lam));
}

// Total weight of all partitions of size n, by enumeration.
inline Rat size_weight(std::uint64_t p, unsigned n, unsigned cap = kEnumerationCap) {
  Rat sum = 0;
  for (const auto& lam : enumerate_partitions(n, cap)) sum += weight(p, lam);
  return sum;
}

// Upper bound on the total weight of all partitions of size > size_cap:
//
//   sum_{i > N} a(i) p^-i  <=  sum_{i > N} (c/p)^i  =  (c/p)^{N+1} / (1 - c/p)
//
// with c = 81/50. c >= golden ratio (c^2 >= c + 1 and the base cases hold),
// so a(i) <= F_{i+1} <= c^i; the aggregate comparison against the exact
// size-weight series holds for every p >= 2 and N >= 0, which the test
// suite checks against enumeration.
inline Rat tail_weight_bound(std::uint64_t p, unsigned size_cap) {
  const Rat ratio = make_rat(Int(81), make_int(p) * 50);  // c/p with c = 81/50
  return rat_pow(ratio, size_cap + 1) / (1 - ratio);
}

// Number of exact factors carried for eta(p) so that the relative tail
// slack p^-M / (p-1) is <= 2^-product_depth; at most product_depth factors
// (p = 2 needs exactly that many).
inline unsigned eta_depth(std::uint64_t p, unsigned product_depth) {
  const Int target = int_pow(2, product_depth);
  Int pw = make_int(p);
  unsigned m = 1;
  while (m < product_depth && pw * (make_int(p) - 1) < target) {
    pw *= make_int(p);
    ++m;
  }
  return m;
}

// Enclosure of eta(p) = prod_{i>=1}(1 - p^-i):
//   hi = exact product to depth M,
//   lo = hi * (1 - p^-M/(p-1)),
// from prod_{i>M}(1-p^-i) >= 1 - sum_{i>M} p^-i = 1 - p^-M/(p-1).
inline Enclosure eta(std::uint64_t p, const Budget& budget) {
  budget.validate();
  const unsigned m = eta_depth(p, budget.product_depth);
  Rat hi = 1;
  for (unsigned i = 1; i <= m; ++i) hi *= 1 - make_rat(Int(1), int_pow(p, i));
  Rat slack = make_rat(Int(1), int_pow(p, m) * (make_int(p) - 1));
  Rat lo = hi * (1 - slack);
  if (lo < 0) lo = 0;
  return Enclosure(lo, hi);
}

// Partition sizes explored at prime p: the full budget cap for small
// primes, fewer once the tail bound alone is below 2^-product_depth (the
// same slack target the eta factors meet). Monotone in both budget fields.
inline unsigned local_partition_cap(std::uint64_t p, const Budget& budget) {
  const Rat target = make_rat(Int(1), int_pow(2, budget.product_depth));
  unsigned n = 1;
  while (n < budget.partition_cap && tail_weight_bound(p, n) > target) ++n;
  return n;
}

struct LocalFiberWeight {
  Enclosure weight;           // [explored, best upper]; may exceed 1
  unsigned partition_cap_used;
};

// Enclosure of the total w_p-weight of a property's fiber. The lower end is
// the exact enumerated weight up to the explored size cap; the upper end is
// min over k <= cap of (explored weight up to k) + (tail bound above k), so
// enclosures at larger budgets always nest inside enclosures at smaller
// ones. A declared finite fiber bound B replaces the infinite tail by the
// bounded range k+1..B (zero once k >= B, making the fiber weight exact).
inline LocalFiberWeight local_fiber_weight(std::uint64_t p, const UniformProperty& e,
                                           const Budget& budget) {
  budget.validate();
  unsigned cap = local_partition_cap(p, budget);
  const auto declared = e.finite_fiber_bound();
  if (declared) cap = std::min(budget.partition_cap, std::max(cap, *declared));

  Rat explored = 0;
  Rat best_upper;
  bool have_upper = false;
  for (unsigned k = 0; k <= cap; ++k) {
    for (const auto& lam : enumerate_partitions(k))
      if (e(lam)) explored += weight(p, lam);
    Rat tail;
    if (declared && k >= *declared)
      tail = 0;
    else if (declared)
      tail = tail_weight_bound(p, k) - tail_weight_bound(p, *declared);
    else
      tail = tail_weight_bound(p, k);
    Rat upper = explored + tail;
    if (!have_upper || upper < best_upper) {
      best_upper = upper;
      have_upper = true;
    }
    if (declared && k >= *declared) break;  // nothing further can contribute
  }
  return LocalFiberWeight{Enclosure(explored, best_upper), cap};
}

struct LocalProbability {
  Enclosure probability;  // clamped to [0,1]
  Enclosure fiber_weight;
  unsigned partition_cap_used;
  unsigned eta_depth_used;
};

// P_p(fiber of E) = w_p(fiber) * eta(p), outward interval product, clamped.
inline LocalProbability local_probability_detail(std::uint64_t p, const UniformProperty& e,
                                                 const Budget& budget) {
  const auto fw = local_fiber_weight(p, e, budget);
  const Enclosure n = eta(p, budget);
  Enclosure prob = clamp01(Enclosure(fw.weight.lo * n.lo, fw.weight.hi * n.hi));
  return LocalProbability{prob, fw.weight, fw.partition_cap_used, eta_depth(p, budget.product_depth)};
}

inline Enclosure local_probability(std::uint64_t p, const UniformProperty& e,
                                   const Budget& budget) {
  return local_probability_detail(p, e, budget).probability;
}

}  // namespace clh
