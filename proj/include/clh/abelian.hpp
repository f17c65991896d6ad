#pragma once

// Finite abelian groups as prime-indexed partitions, their invariants, and
// automorphism group orders. aut_order uses the closed product formula read
// off lambda and its conjugate; aut_order_oracle counts bijections by raw
// enumeration and exists so the formula never has to be taken on faith.

#include "clh/partition.hpp"
#include "clh/primes.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clh {

class FinAbGroup {
 public:
  FinAbGroup() = default;  // the trivial group

  static FinAbGroup from_parts(std::map<std::uint64_t, Partition> parts) {
    FinAbGroup g;
    for (auto& [p, lam] : parts) {
      if (lam.empty()) continue;  // canonical: trivial p-parts are not stored
      if (!is_prime(p)) throw std::invalid_argument("group key is not prime: " + std::to_string(p));
      g.parts_.emplace(p, std::move(lam));
    }
    return g;
  }

  const std::map<std::uint64_t, Partition>& local_parts() const { return parts_; }

  const Partition& part_at(std::uint64_t p) const {
    static const Partition empty;
    auto it = parts_.find(p);
    return it == parts_.end() ? empty : it->second;
  }

  bool is_trivial() const { return parts_.empty(); }

  // Elementary-divisor text form: "4,2,3" = Z/4 + Z/2 + Z/3; "1" = trivial.
  // Divisors are emitted grouped by ascending prime, parts descending.
  std::string text() const {
    if (parts_.empty()) return "1";
    std::string out;
    bool first = true;
    for (const auto& [p, lam] : parts_) {
      for (unsigned e : lam.parts()) {
        if (!first) out += ',';
        first = false;
        out += Int(int_pow(p, e)).get_str();
      }
    }
    return out;
  }

  static FinAbGroup parse(std::string_view text) {
    if (text == "1") return FinAbGroup();
    std::map<std::uint64_t, std::vector<unsigned>> exps;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      std::string tok(text.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad group text: \"" + std::string(text) + "\"");
      std::uint64_t d = std::stoull(tok);
      if (d < 2) throw std::invalid_argument("elementary divisor must be >= 2: " + tok);
      auto f = factorize(d);
      if (f.size() != 1)
        throw std::invalid_argument("elementary divisor is not a prime power: " + tok);
      exps[f[0].prime].push_back(f[0].exponent);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    std::map<std::uint64_t, Partition> parts;
    for (auto& [p, es] : exps) {
      std::sort(es.begin(), es.end(), std::greater<>());
      parts.emplace(p, Partition(es));
    }
    return from_parts(std::move(parts));
  }

  friend bool operator==(const FinAbGroup&, const FinAbGroup&) = default;
  friend bool operator<(const FinAbGroup& a, const FinAbGroup& b) { return a.parts_ < b.parts_; }

 private:
  std::map<std::uint64_t, Partition> parts_;
};

struct GroupInvariants {
  Int order;
  unsigned rank;
  Int exponent;
  unsigned uniform_order;
  unsigned uniform_exponent;
};

inline GroupInvariants invariants(const FinAbGroup& g) {
  GroupInvariants inv{Int(1), 0, Int(1), 0, 0};
  for (const auto& [p, lam] : g.local_parts()) {
    inv.order *= int_pow(p, lam.size());
    inv.exponent *= int_pow(p, lam.largest_part());
    inv.rank = std::max<unsigned>(inv.rank, static_cast<unsigned>(lam.num_parts()));
    inv.uniform_order = std::max(inv.uniform_order, lam.size());
    inv.uniform_exponent = std::max(inv.uniform_exponent, lam.largest_part());
  }
  return inv;
}

// #Aut of the abelian p-group of type lambda, exactly:
//
//   #Aut = p^(sum_i conj_i^2) * prod over part values v with multiplicity m_v
//          of prod_{j=1..m_v} (1 - p^-j),
//
// evaluated integrally as p^(S - T) * prod (p^j - 1) with T the sum of the
// exponents j. The acceptance suite demands exact agreement with
// aut_order_oracle before this formula is trusted at larger sizes.
inline Int aut_order(std::uint64_t p, const Partition& lam) {
  if (!is_prime(p)) throw std::invalid_argument("aut_order: p must be prime");
  const Partition conj = lam.conjugate();
  unsigned long s = 0;
  for (unsigned c : conj.parts()) s += static_cast<unsigned long>(c) * c;
  unsigned long t = 0;
  Int prod = 1;
  const auto& parts = lam.parts();
  for (std::size_t i = 0; i < parts.size();) {
    std::size_t j = i;
    while (j < parts.size() && parts[j] == parts[i]) ++j;
    unsigned long mult = j - i;
    for (unsigned long k = 1; k <= mult; ++k) {
      t += k;
      prod *= int_pow(p, k) - 1;
    }
    i = j;
  }
  return int_pow(p, s - t) * prod;
}

inline Int group_aut_order(const FinAbGroup& g) {
  Int r = 1;
  for (const auto& [p, lam] : g.local_parts()) r *= aut_order(p, lam);
  return r;
}

namespace detail {

// Dense element arithmetic in G = (+)_i Z/p^{lambda_i}: digit vectors plus a
// mixed-radix index into [0, |G|).
struct GroupArith {
  std::vector<std::uint32_t> radix;   // p^{lambda_i}
  std::vector<std::uint32_t> stride;  // index strides
  std::uint64_t order = 1;

  GroupArith(std::uint64_t p, const Partition& lam) {
    for (unsigned e : lam.parts()) {
      Int r = int_pow(p, e);
      if (r > (1 << 26)) throw budget_error("aut_order_oracle: coordinate radix exceeds element cap");
      radix.push_back(static_cast<std::uint32_t>(r.get_ui()));
    }
    for (std::uint32_t r : radix) {
      stride.push_back(static_cast<std::uint32_t>(order));
      order *= r;
      if (order > (1ull << 26)) throw budget_error("aut_order_oracle: group order exceeds element cap");
    }
  }

  std::uint32_t index_of(const std::vector<std::uint32_t>& digits) const {
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < digits.size(); ++j) idx += std::uint64_t(digits[j]) * stride[j];
    return static_cast<std::uint32_t>(idx);
  }

  void add_into(std::vector<std::uint32_t>& acc, const std::vector<std::uint32_t>& g) const {
    for (std::size_t j = 0; j < acc.size(); ++j) {
      acc[j] += g[j];
      if (acc[j] >= radix[j]) acc[j] -= radix[j];
    }
  }

  std::vector<std::uint32_t> scalar_mul(std::uint64_t t, const std::vector<std::uint32_t>& g) const {
    std::vector<std::uint32_t> out(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
      out[j] = static_cast<std::uint32_t>((t % radix[j]) * g[j] % radix[j]);
    return out;
  }
};

}  // namespace detail

// Counts bijective endomorphisms of the abelian p-group of type lambda by
// exhausting all generator-image assignments consistent with the generator
// orders. Images are enumerated as sets: the partial images S_i are the
// subgroups generated by the first i chosen images, and an assignment is
// bijective iff every level keeps its cosets disjoint (equivalently, iff the
// enumerated image exhausts G). Subtrees whose partial image already
// collides contain no bijections and are skipped wholesale; the count is
// exactly the number of bijective assignments.
//
// Refuses when the total number of assignments (#Hom) exceeds hom_cap.
inline Int aut_order_oracle(std::uint64_t p, const Partition& lam,
                            std::uint64_t hom_cap = 100'000'000) {
  if (!is_prime(p)) throw std::invalid_argument("aut_order_oracle: p must be prime");
  if (lam.empty()) return 1;

  const detail::GroupArith ga(p, lam);
  const std::size_t k = lam.num_parts();

  // #Hom = prod_{i,j} p^{min(lambda_i, lambda_j)}
  Int hom_count = 1;
  for (unsigned a : lam.parts())
    for (unsigned b : lam.parts()) hom_count *= int_pow(p, std::min(a, b));
  if (hom_count > make_int(hom_cap))
    throw budget_error("aut_order_oracle: #Hom = " + hom_count.get_str() +
                       " exceeds cap " + std::to_string(hom_cap));

  // Candidate images for generator i: all elements killed by p^{lambda_i},
  // i.e. coordinate j runs over multiples of p^{max(0, lambda_j - lambda_i)}.
  std::vector<std::vector<std::vector<std::uint32_t>>> candidates(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::uint32_t> step(k), count(k);
    for (std::size_t j = 0; j < k; ++j) {
      unsigned extra = lam.parts()[j] > lam.parts()[i] ? lam.parts()[j] - lam.parts()[i] : 0;
      Int st = int_pow(p, extra);
      step[j] = static_cast<std::uint32_t>(st.get_ui());
      count[j] = ga.radix[j] / step[j];
    }
    std::vector<std::uint32_t> digits(k, 0);
    auto gen = [&](auto&& self, std::size_t j) -> void {
      if (j == k) {
        candidates[i].push_back(digits);
        return;
      }
      for (std::uint32_t t = 0; t < count[j]; ++t) {
        digits[j] = t * step[j];
        self(self, j + 1);
      }
      digits[j] = 0;
    };
    gen(gen, 0);
  }

  // membership[idx] != 0 marks idx in the current partial image subgroup.
  std::vector<std::uint8_t> member(ga.order, 0);
  std::vector<std::uint32_t> subgroup;  // indices, in insertion order
  std::vector<std::vector<std::uint32_t>> subgroup_elems;
  member[0] = 1;
  subgroup.push_back(0);
  subgroup_elems.push_back(std::vector<std::uint32_t>(k, 0));

  Int bijections = 0;
  auto rec = [&](auto&& self, std::size_t level) -> void {
    if (level == k) {
      ++bijections;
      return;
    }
    const std::uint64_t rad = ga.radix[level];
    for (const auto& img : candidates[level]) {
      // The cosets S + t*img (0 <= t < rad) are disjoint iff img has full
      // order rad modulo S, iff (rad/p)*img is not already in S.
      auto probe = ga.scalar_mul(rad / p, img);
      if (member[ga.index_of(probe)]) continue;

      if (level + 1 == k) {
        // No further level needs the enlarged subgroup.
        ++bijections;
        continue;
      }

      std::size_t base = subgroup.size();
      std::vector<std::uint32_t> shift(k, 0);
      for (std::uint64_t t = 1; t < rad; ++t) {
        ga.add_into(shift, img);
        for (std::size_t s = 0; s < base; ++s) {
          auto elem = subgroup_elems[s];
          ga.add_into(elem, shift);
          std::uint32_t idx = ga.index_of(elem);
          member[idx] = 1;
          subgroup.push_back(idx);
          subgroup_elems.push_back(std::move(elem));
        }
      }
      self(self, level + 1);
      while (subgroup.size() > base) {
        member[subgroup.back()] = 0;
        subgroup.pop_back();
        subgroup_elems.pop_back();
      }
    }
  };
  rec(rec, 0);
  return bijections;
}

}  // namespace clh
