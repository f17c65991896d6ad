#pragma once

// The global Cohen-Lenstra probability of uniform properties and of the
// O/D set algebra: an Euler-style product of local probabilities over all
// primes up to a cutoff, with a rigorous rational enclosure for the
// remaining prime tail, plus exhaustive product-space oracles on finite
// prime sets.
//
// Prime-tail bound: whenever a fiber contains {(), (1)},
//   P_p(fiber) >= P_p({0,1}) = prod_{i>=2}(1-p^-i) >= 1 - 1/(p(p-1)),
// so  prod_{p>x} P_p(fiber) >= 1 - sum_{m>x} 1/(m(m-1)) = 1 - 1/x.

#include "clh/local_measure.hpp"
#include "clh/primes.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace clh {

inline constexpr unsigned kInclusionExclusionCap = 12;
inline constexpr std::uint64_t kTupleCap = 4'000'000;

struct PrimeClassRule {
  enum class Kind { single_prime, residue, otherwise };
  Kind kind = Kind::otherwise;
  std::uint64_t q = 0;  // single_prime: the prime itself
  std::uint64_t r = 0, m = 0;  // residue: p = r (mod m)
  UniformProperty property;
};

// An ordered rule list; the first matching rule wins and the mandatory
// trailing `otherwise` makes the rules a partition of all primes.
struct PrimeClasses {
  std::vector<PrimeClassRule> rules;

  void validate() const {
    if (rules.empty() || rules.back().kind != PrimeClassRule::Kind::otherwise)
      throw std::invalid_argument("prime classes must end with an otherwise rule");
    for (const auto& rule : rules) {
      if (!rule.property.valid()) throw std::invalid_argument("prime class without property");
      if (rule.kind == PrimeClassRule::Kind::residue && rule.m < 2)
        throw std::invalid_argument("residue class modulus must be >= 2");
      if (rule.kind == PrimeClassRule::Kind::single_prime && !is_prime(rule.q))
        throw std::invalid_argument("single-prime class key is not prime");
    }
  }

  const UniformProperty& property_for(std::uint64_t p) const {
    for (const auto& rule : rules) {
      switch (rule.kind) {
        case PrimeClassRule::Kind::single_prime:
          if (p == rule.q) return rule.property;
          break;
        case PrimeClassRule::Kind::residue:
          if (p % rule.m == rule.r) return rule.property;
          break;
        case PrimeClassRule::Kind::otherwise:
          return rule.property;
      }
    }
    throw std::logic_error("prime class rules did not cover prime");
  }
};

struct GlobalConfig {
  std::uint64_t prime_cutoff = 1000;
  Budget local_budget{};
  std::vector<std::uint64_t> excluded_primes{};
  std::optional<PrimeClasses> prime_classes{};

  void validate() const {
    if (prime_cutoff < 3) throw std::invalid_argument("prime cutoff must be >= 3");
    local_budget.validate();
    for (std::uint64_t p : excluded_primes)
      if (!is_prime(p)) throw std::invalid_argument("excluded entry is not prime");
  }
};

namespace detail {

// Running product of probability enclosures over many primes, held in
// fixed-point with 192 fractional bits and rounded outward each step. The
// endpoints stay exact rationals (dyadic); the outward rounding adds at
// most 2^-192 per factor, far below every tolerance in play.
class ProductAccumulator {
 public:
  ProductAccumulator() {
    mpz_setbit(one_.get_mpz_t(), kShift);
    lo_ = one_;
    hi_ = one_;
  }

  void multiply(const Enclosure& e) {
    Int t = lo_ * Int(e.lo.get_num());
    mpz_fdiv_q(lo_.get_mpz_t(), t.get_mpz_t(), Int(e.lo.get_den()).get_mpz_t());
    t = hi_ * Int(e.hi.get_num());
    mpz_cdiv_q(hi_.get_mpz_t(), t.get_mpz_t(), Int(e.hi.get_den()).get_mpz_t());
    if (hi_ > one_) hi_ = one_;
    if (lo_ < 0) lo_ = 0;
  }

  Enclosure result() const { return Enclosure(make_rat(lo_, one_), make_rat(hi_, one_)); }

 private:
  static constexpr unsigned kShift = 192;
  Int one_;
  Int lo_, hi_;
};

inline bool accepts_zero_and_one(const UniformProperty& e) {
  return e(Partition()) && e(Partition({1}));
}

}  // namespace detail

struct MeasureResult {
  Enclosure value;
  Rat prime_tail_lo;  // the 1 - 1/x factor applied (1 when short-circuited)
};

// P(O(E)) = prod_p P_p(fiber), truncated at the cutoff with the 1 - 1/x
// prime-tail factor. Exactly [0,0] when E rejects the empty partition or
// the partition (1); by the zero laws those cases have measure zero and
// the product bound would never certify it.
inline MeasureResult measure_property(const UniformProperty& e, const GlobalConfig& cfg) {
  cfg.validate();
  if (!detail::accepts_zero_and_one(e)) return MeasureResult{Enclosure(), Rat(1)};
  const std::set<std::uint64_t> excluded(cfg.excluded_primes.begin(), cfg.excluded_primes.end());
  detail::ProductAccumulator acc;
  for (std::uint64_t p : primes_up_to(cfg.prime_cutoff)) {
    if (excluded.count(p)) continue;
    acc.multiply(local_probability(p, e, cfg.local_budget));
  }
  const Rat tail_lo = 1 - make_rat(Int(1), make_int(cfg.prime_cutoff));
  Enclosure value = acc.result();
  value = clamp01(Enclosure(value.lo * tail_lo, value.hi));
  return MeasureResult{value, tail_lo};
}

// Product over an explicit finite prime set, with no prime tail: the
// measure of the cylinder inside the genuine product space over those
// primes. Exact rational arithmetic throughout.
inline Enclosure measure_property_finite(const UniformProperty& e,
                                         const std::vector<std::uint64_t>& primes,
                                         const Budget& budget) {
  Enclosure out(Rat(1), Rat(1));
  for (std::uint64_t p : primes) {
    Enclosure f = local_probability(p, e, budget);
    out = Enclosure(out.lo * f.lo, out.hi * f.hi);
  }
  return out;
}

namespace detail {

// Inclusion-exclusion over the members of an O-set, with an arbitrary
// per-conjunction measure. Interval sum with signs, clamped to [0,1].
template <typename TermFn>
Enclosure measure_oset_by(const std::vector<UniformProperty>& members, TermFn&& term) {
  if (members.empty()) return Enclosure();
  if (members.size() > kInclusionExclusionCap)
    throw budget_error("inclusion-exclusion over " + std::to_string(members.size()) +
                       " properties exceeds cap " + std::to_string(kInclusionExclusionCap));
  Rat lo = 0, hi = 0;
  const std::size_t r = members.size();
  for (std::size_t mask = 1; mask < (std::size_t(1) << r); ++mask) {
    UniformProperty conj;
    for (std::size_t i = 0; i < r; ++i) {
      if (!(mask & (std::size_t(1) << i))) continue;
      conj = conj.valid() ? and_(conj, members[i]) : members[i];
    }
    Enclosure t = term(conj);
    if (std::popcount(mask) % 2 == 1) {
      lo += t.lo;
      hi += t.hi;
    } else {
      lo -= t.hi;
      hi -= t.lo;
    }
  }
  return clamp01(Enclosure(std::min(lo, hi), std::max(lo, hi)));
}

}  // namespace detail

inline Enclosure measure_O(const OSet& s, const GlobalConfig& cfg) {
  return detail::measure_oset_by(s.members, [&](const UniformProperty& conj) {
    return measure_property(conj, cfg).value;
  });
}

inline Enclosure measure_O_finite(const OSet& s, const std::vector<std::uint64_t>& primes,
                                  const Budget& budget) {
  return detail::measure_oset_by(s.members, [&](const UniformProperty& conj) {
    return measure_property_finite(conj, primes, budget);
  });
}

// P(D) = P(O(positives)) - P(O(normalized negatives)); normalization makes
// the negatives a subset of the positives' union so the subtraction is the
// true set-difference measure.
inline Enclosure measure_D(const DSet& d, const GlobalConfig& cfg) {
  const DSet n = normalize(d);
  if (n.positives.empty()) return Enclosure();
  Enclosure pos = measure_O(OSet{n.positives}, cfg);
  if (n.negatives.empty()) return pos;
  Enclosure neg = measure_O(OSet{n.negatives}, cfg);
  return clamp01(pos - neg);
}

inline Enclosure measure_D_finite(const DSet& d, const std::vector<std::uint64_t>& primes,
                                  const Budget& budget) {
  const DSet n = normalize(d);
  if (n.positives.empty()) return Enclosure();
  Enclosure pos = measure_O_finite(OSet{n.positives}, primes, budget);
  if (n.negatives.empty()) return pos;
  Enclosure neg = measure_O_finite(OSet{n.negatives}, primes, budget);
  return clamp01(pos - neg);
}

using MeasurableTarget = std::variant<UniformProperty, OSet, DSet>;

namespace detail {

// Membership of a tuple (lambda_p)_{p in I} of the product space, evaluated
// coordinate-wise (there are no primes outside I in this space).
inline bool tuple_member(const MeasurableTarget& target, const std::vector<Partition>& tuple) {
  auto all_satisfy = [&](const UniformProperty& e) {
    for (const auto& lam : tuple)
      if (!e(lam)) return false;
    return true;
  };
  return std::visit(
      [&](const auto& t) -> bool {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, UniformProperty>) {
          return all_satisfy(t);
        } else if constexpr (std::is_same_v<T, OSet>) {
          for (const auto& e : t.members)
            if (all_satisfy(e)) return true;
          return false;
        } else {
          bool in_pos = false;
          for (const auto& e : t.positives)
            if (all_satisfy(e)) {
              in_pos = true;
              break;
            }
          if (!in_pos) return false;
          for (const auto& f : t.negatives)
            if (all_satisfy(f)) return false;
          return true;
        }
      },
      target);
}

}  // namespace detail

// The genuine product-probability of a target's membership set inside
// prod_{p in I} G_p, by exhausting all tuples with per-prime partition size
// <= budget.partition_cap. The enclosure width comes only from the local
// truncations: the eta normalizers and the unexplored tuples, whose total
// mass is bounded by 1 - (explored weight) * (eta lower bounds).
inline Enclosure truncated_space_measure(const MeasurableTarget& target,
                                         const std::vector<std::uint64_t>& primes,
                                         const Budget& budget) {
  budget.validate();
  if (primes.empty())
    return detail::tuple_member(target, {}) ? Enclosure::point(Rat(1)) : Enclosure();

  struct LocalLayer {
    std::vector<Partition> parts;
    std::vector<Rat> weights;
    Rat total;
    Enclosure eta;
  };
  std::vector<LocalLayer> layers;
  std::uint64_t tuples = 1;
  for (std::uint64_t p : primes) {
    if (!is_prime(p)) throw std::invalid_argument("truncated space: not a prime");
    LocalLayer layer;
    layer.parts = enumerate_partitions_up_to(budget.partition_cap);
    layer.total = 0;
    for (const auto& lam : layer.parts) {
      layer.weights.push_back(weight(p, lam));
      layer.total += layer.weights.back();
    }
    layer.eta = eta(p, budget);
    tuples *= layer.parts.size();
    if (tuples > kTupleCap)
      throw budget_error("truncated space enumeration exceeds tuple cap");
    layers.push_back(std::move(layer));
  }

  Rat member_weight = 0;
  std::vector<std::size_t> idx(primes.size(), 0);
  std::vector<Partition> tuple(primes.size());
  for (;;) {
    Rat w = 1;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      tuple[i] = layers[i].parts[idx[i]];
      w *= layers[i].weights[idx[i]];
    }
    if (detail::tuple_member(target, tuple)) member_weight += w;
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == layers[i].parts.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }

  Rat explored = 1, eta_lo = 1, eta_hi = 1;
  for (const auto& layer : layers) {
    explored *= layer.total;
    eta_lo *= layer.eta.lo;
    eta_hi *= layer.eta.hi;
  }
  Rat lo = member_weight * eta_lo;
  Rat hi = std::min(member_weight * eta_hi + (1 - explored * eta_lo),
                    1 - (explored - member_weight) * eta_lo);
  hi = std::min(hi, Rat(1));
  hi = std::max(hi, lo);
  return Enclosure(lo, hi);
}

// The section-4 variant: each prime takes the property of its class;
// excluded primes contribute a free coordinate. All class properties must
// accept () and (1), otherwise the measure is exactly zero.
inline MeasureResult measure_with_classes(const GlobalConfig& cfg) {
  cfg.validate();
  if (!cfg.prime_classes) throw std::invalid_argument("measure_with_classes: no classes");
  cfg.prime_classes->validate();
  for (const auto& rule : cfg.prime_classes->rules)
    if (!detail::accepts_zero_and_one(rule.property)) return MeasureResult{Enclosure(), Rat(1)};
  const std::set<std::uint64_t> excluded(cfg.excluded_primes.begin(), cfg.excluded_primes.end());
  detail::ProductAccumulator acc;
  for (std::uint64_t p : primes_up_to(cfg.prime_cutoff)) {
    if (excluded.count(p)) continue;
    acc.multiply(local_probability(p, cfg.prime_classes->property_for(p), cfg.local_budget));
  }
  const Rat tail_lo = 1 - make_rat(Int(1), make_int(cfg.prime_cutoff));
  Enclosure value = acc.result();
  value = clamp01(Enclosure(value.lo * tail_lo, value.hi));
  return MeasureResult{value, tail_lo};
}

struct DemoRow {
  std::uint64_t x;
  Rat partial_product;
};

// Witnesses the collapse to zero of any content of the fixed-order set
// S_n = {G : ord(G) = n}: S_n forces |G_p| = p^{v_p(n)} at every prime, so
// P(S_n) <= prod_{p<=x} hi(P_p({lambda : |lambda| = v_p(n)})). For p not
// dividing n the factor is hi(P_p({0})), the eta(p) upper bound. The
// partial products are strictly decreasing and tend to 0.
inline std::vector<DemoRow> nonmeasurability_demo(std::uint64_t n,
                                                  const std::vector<std::uint64_t>& x_schedule,
                                                  const Budget& budget = Budget{}) {
  if (n < 1) throw std::invalid_argument("demo: n must be positive");
  if (x_schedule.empty()) throw std::invalid_argument("demo: empty schedule");
  for (std::size_t i = 1; i < x_schedule.size(); ++i)
    if (x_schedule[i] <= x_schedule[i - 1])
      throw std::invalid_argument("demo: schedule must be strictly increasing");

  std::vector<DemoRow> rows;
  Rat product = 1;
  std::size_t next = 0;
  for (std::uint64_t p : primes_up_to(x_schedule.back())) {
    while (next < x_schedule.size() && x_schedule[next] < p) {
      rows.push_back({x_schedule[next], product});
      ++next;
    }
    const unsigned v = prime_valuation(n, p);
    Rat factor = eta(p, budget).hi;
    if (v > 0) factor *= size_weight(p, v);
    product *= factor;
  }
  while (next < x_schedule.size()) {
    rows.push_back({x_schedule[next], product});
    ++next;
  }
  return rows;
}

enum class UniformQuantity { rank, uniform_order, uniform_exponent };

namespace detail {

inline UniformProperty level_property(UniformQuantity q, unsigned m) {
  switch (q) {
    case UniformQuantity::rank: return rank_le(m);
    case UniformQuantity::uniform_order: return usize_le(m);
    case UniformQuantity::uniform_exponent: return uexp_le(m);
  }
  throw std::logic_error("unreachable");
}

// f >= k at some prime forces a local partition of size >= k there, so
// P(f >= k) <= 1 - prod_p P_p(size <= k-1) <= sum_p tail_weight_bound(p, k-1).
// Over all primes and k >= 2 this is <= 3 (c/2)^k / (1 - c/2).
inline Rat level_tail_all_primes(unsigned k) {
  const Rat half_c = make_rat(81, 100);  // c/2
  return 3 * rat_pow(half_c, k) / (1 - half_c);
}

}  // namespace detail

// E[f] = sum_{k>=1} P(f >= k) for f in {rank, uniform order, uniform
// exponent}, levels truncated at level_cap with an explicit analytic tail.
inline Enclosure expected_value(UniformQuantity q, const GlobalConfig& cfg,
                                unsigned level_cap = 64) {
  if (level_cap < 2) throw std::invalid_argument("expected_value: level cap too small");
  Rat lo = 0, hi = 0;
  for (unsigned k = 1; k <= level_cap; ++k) {
    Enclosure below = measure_property(detail::level_property(q, k - 1), cfg).value;
    Rat term_lo = std::max(Rat(0), 1 - below.hi);
    Rat term_hi = 1 - below.lo;
    if (k >= 2) term_hi = std::min(term_hi, detail::level_tail_all_primes(k));
    term_lo = std::min(term_lo, term_hi);
    lo += term_lo;
    hi += term_hi;
  }
  const Rat half_c = make_rat(81, 100);
  hi += 3 * rat_pow(half_c, level_cap + 1) / ((1 - half_c) * (1 - half_c));
  return Enclosure(lo, hi);
}

inline Enclosure expected_value_finite(UniformQuantity q, const std::vector<std::uint64_t>& primes,
                                       const Budget& budget, unsigned level_cap = 64) {
  if (level_cap < 1) throw std::invalid_argument("expected_value: level cap too small");
  Rat lo = 0, hi = 0;
  for (unsigned k = 1; k <= level_cap; ++k) {
    Enclosure below = measure_property_finite(detail::level_property(q, k - 1), primes, budget);
    Rat analytic = 0;
    for (std::uint64_t p : primes) analytic += tail_weight_bound(p, k - 1);
    Rat term_lo = std::max(Rat(0), 1 - below.hi);
    Rat term_hi = std::min(1 - below.lo, analytic);
    term_lo = std::min(term_lo, term_hi);
    lo += term_lo;
    hi += term_hi;
  }
  Rat tail = 0;
  for (std::uint64_t p : primes) {
    const Rat ratio = make_rat(Int(81), make_int(p) * 50);
    tail += rat_pow(ratio, level_cap + 1) / ((1 - ratio) * (1 - ratio));
  }
  hi += tail;
  return Enclosure(lo, hi);
}

}  // namespace clh
