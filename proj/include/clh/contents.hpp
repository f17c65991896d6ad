#pragma once

// The classical content-based alternatives: the global Cohen-Lenstra
// content on the algebra of sets specified at finitely many places, the
// weight-ordered content (groups ordered by their order, weights summed to
// a cutoff), and sequence densities.

#include "clh/global_measure.hpp"
#include "clh/local_measure.hpp"

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clh {

// Per-prime constraint inside a cell: an explicit finite set of partitions,
// a predicate evaluated up to the content budget, or unconstrained.
struct LocalDescriptor {
  enum class Kind { explicit_set, predicate, full };
  Kind kind = Kind::full;
  std::vector<Partition> set;
  UniformProperty property;

  static LocalDescriptor of_set(std::vector<Partition> parts) {
    LocalDescriptor d;
    d.kind = Kind::explicit_set;
    d.set = std::move(parts);
    return d;
  }
  static LocalDescriptor of_predicate(UniformProperty e) {
    LocalDescriptor d;
    d.kind = Kind::predicate;
    d.property = std::move(e);
    return d;
  }
};

struct Cell {
  std::map<std::uint64_t, LocalDescriptor> at;  // keys within the support
};

// S = S_I x (unconstrained elsewhere); S_I is the disjoint union of the
// cells. Disjointness is verified for pairs of cells that are explicit at
// every constrained prime; cells involving predicates carry disjointness as
// a documented precondition.
struct AlgebraSet {
  std::vector<std::uint64_t> support;
  std::vector<Cell> cells;
};

class overlap_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool cell_fully_explicit(const Cell& c) {
  for (const auto& [p, d] : c.at)
    if (d.kind == LocalDescriptor::Kind::predicate) return false;
  return true;
}

// Nonempty-intersection test per prime; "full" intersects everything
// except an explicitly empty set.
inline bool descriptors_intersect(const LocalDescriptor& a, const LocalDescriptor& b) {
  using K = LocalDescriptor::Kind;
  if (a.kind == K::explicit_set && b.kind == K::explicit_set) {
    for (const auto& x : a.set)
      for (const auto& y : b.set)
        if (x == y) return true;
    return false;
  }
  const auto* s = a.kind == K::explicit_set ? &a : (b.kind == K::explicit_set ? &b : nullptr);
  if (s) return !s->set.empty();
  return true;
}

inline bool cells_intersect(const AlgebraSet& a, std::size_t i, std::size_t j) {
  static const LocalDescriptor full{};
  for (std::uint64_t p : a.support) {
    auto ita = a.cells[i].at.find(p);
    auto itb = a.cells[j].at.find(p);
    const LocalDescriptor& da = ita == a.cells[i].at.end() ? full : ita->second;
    const LocalDescriptor& db = itb == a.cells[j].at.end() ? full : itb->second;
    if (!descriptors_intersect(da, db)) return false;
  }
  return true;  // intersects at every place, hence nonempty
}

inline Enclosure descriptor_probability(std::uint64_t p, const LocalDescriptor& d,
                                        const Budget& budget) {
  switch (d.kind) {
    case LocalDescriptor::Kind::full:
      return Enclosure(Rat(1), Rat(1));
    case LocalDescriptor::Kind::explicit_set: {
      Rat w = 0;
      for (const auto& lam : d.set) w += weight(p, lam);
      const Enclosure n = eta(p, budget);
      return clamp01(Enclosure(w * n.lo, w * n.hi));
    }
    case LocalDescriptor::Kind::predicate:
      return local_probability(p, d.property, budget);
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

// content(S) = sum over cells of prod_{p in I} P_p(descriptor).
inline Enclosure content(const AlgebraSet& a, const Budget& budget) {
  budget.validate();
  for (std::uint64_t p : a.support)
    if (!is_prime(p)) throw std::invalid_argument("content: support contains a non-prime");
  for (std::size_t i = 0; i < a.cells.size(); ++i)
    for (std::size_t j = i + 1; j < a.cells.size(); ++j) {
      if (!detail::cell_fully_explicit(a.cells[i]) || !detail::cell_fully_explicit(a.cells[j]))
        continue;
      if (detail::cells_intersect(a, i, j))
        throw overlap_error("content: cells " + std::to_string(i) + " and " + std::to_string(j) +
                            " overlap");
    }
  Rat lo = 0, hi = 0;
  for (const auto& cell : a.cells) {
    Rat cell_lo = 1, cell_hi = 1;
    for (std::uint64_t p : a.support) {
      auto it = cell.at.find(p);
      static const LocalDescriptor full{};
      Enclosure f = detail::descriptor_probability(p, it == cell.at.end() ? full : it->second, budget);
      cell_lo *= f.lo;
      cell_hi *= f.hi;
    }
    lo += cell_lo;
    hi += cell_hi;
  }
  return clamp01(Enclosure(lo, std::max(lo, hi)));
}

// All isomorphism classes of abelian groups of order n: one partition of
// e_p per prime power p^{e_p} of n; the count is prod a(e_p).
inline std::vector<FinAbGroup> enumerate_groups_of_order(std::uint64_t n,
                                                         std::uint64_t factor_cap = kFactorCap) {
  const auto factors = factorize(n, factor_cap);
  std::vector<FinAbGroup> out;
  std::map<std::uint64_t, Partition> current;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == factors.size()) {
      out.push_back(FinAbGroup::from_parts(current));
      return;
    }
    for (const auto& lam : enumerate_partitions(factors[i].exponent)) {
      current[factors[i].prime] = lam;
      self(self, i + 1);
    }
    current.erase(factors[i].prime);
  };
  rec(rec, 0);
  return out;
}

struct WContentRow {
  std::uint64_t cutoff;  // ratio over all groups with ord(G) < cutoff
  Rat ratio;
};

struct WContentResult {
  Rat ratio;  // at the requested cutoff
  std::vector<WContentRow> table;
};

// The by-order content: sum of w(G) = 1/#Aut(G) over members with
// ord(G) < x, divided by the same sum over all groups, exactly.
inline WContentResult weight_ordered_content(
    const std::function<bool(const FinAbGroup&)>& member, std::uint64_t x,
    std::uint64_t enumeration_cap = 100'000) {
  if (x < 2) throw std::invalid_argument("weight_ordered_content: cutoff must be >= 2");
  if (x > enumeration_cap)
    throw budget_error("weight_ordered_content: cutoff exceeds enumeration cap");
  Rat num = 0, den = 0;
  WContentResult result;
  for (std::uint64_t n = 1; n < x; ++n) {
    for (const auto& g : enumerate_groups_of_order(n)) {
      Rat w = make_rat(Int(1), group_aut_order(g));
      den += w;
      if (member(g)) num += w;
    }
    result.table.push_back({n + 1, num / den});
  }
  result.ratio = num / den;
  return result;
}

struct DensityRow {
  std::uint64_t n;
  Rat density;
};

// Reads one group per line ("4,2,3" elementary-divisor form, "1" trivial;
// blank lines and lines starting with '#' are skipped) and reports exact
// running densities at the requested checkpoints.
inline std::vector<DensityRow> sequence_density(std::istream& in,
                                                const std::function<bool(const FinAbGroup&)>& member,
                                                const std::vector<std::uint64_t>& checkpoints) {
  std::vector<DensityRow> rows;
  std::uint64_t n = 0, hits = 0, line_no = 0;
  std::string line;
  std::size_t next = 0;
  std::vector<std::uint64_t> cps = checkpoints;
  std::sort(cps.begin(), cps.end());
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    FinAbGroup g;
    try {
      g = FinAbGroup::parse(line);
    } catch (const std::exception& ex) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + ex.what());
    }
    ++n;
    if (member(g)) ++hits;
    while (next < cps.size() && cps[next] == n) {
      rows.push_back({n, make_rat(make_int(hits), make_int(n))});
      ++next;
    }
  }
  if (n > 0 && (rows.empty() || rows.back().n != n))
    rows.push_back({n, make_rat(make_int(hits), make_int(n))});
  return rows;
}

}  // namespace clh
