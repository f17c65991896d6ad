#pragma once

// Uniform properties: decidable predicates on partitions, applied
// identically at every prime. A group satisfies a uniform property iff all
// of its p-parts do (including the empty partition at absent primes). OSet
// and DSet form the finite-union / set-difference algebra built from their
// fibers.

#include "clh/abelian.hpp"
#include "clh/partition.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace clh {

class UniformProperty {
 public:
  UniformProperty() = default;

  // A declared finite_fiber_bound B certifies predicate(lambda) = 0 for all
  // |lambda| > B. Bounds produced by the builders below hold structurally;
  // caller-supplied bounds are spot-checked on sizes B+1 .. B+8 at
  // construction. A bound that survives the spot check but is wrong is a
  // caller bug.
  static UniformProperty make(std::string name, std::function<bool(const Partition&)> predicate,
                              std::optional<unsigned> finite_fiber_bound = std::nullopt,
                              bool spot_check = true) {
    auto impl = std::make_shared<Impl>();
    impl->name = std::move(name);
    impl->predicate = std::move(predicate);
    impl->finite_fiber_bound = finite_fiber_bound;
    if (finite_fiber_bound && spot_check) {
      unsigned b = *finite_fiber_bound;
      for (unsigned n = b + 1; n <= b + 8 && n <= kEnumerationCap; ++n)
        for (const auto& lam : enumerate_partitions(n))
          if (impl->predicate(lam))
            throw std::invalid_argument("finite fiber bound " + std::to_string(b) +
                                        " violated by partition " + lam.text() +
                                        " in property " + impl->name);
    }
    UniformProperty e;
    e.impl_ = std::move(impl);
    return e;
  }

  bool operator()(const Partition& lam) const { return impl_->predicate(lam); }
  const std::string& name() const { return impl_->name; }
  std::optional<unsigned> finite_fiber_bound() const { return impl_->finite_fiber_bound; }
  bool valid() const { return impl_ != nullptr; }

 private:
  struct Impl {
    std::string name;
    std::function<bool(const Partition&)> predicate;
    std::optional<unsigned> finite_fiber_bound;
  };
  std::shared_ptr<const Impl> impl_;
};

inline UniformProperty always() {
  return UniformProperty::make("always", [](const Partition&) { return true; });
}

inline UniformProperty rank_le(unsigned r) {
  std::optional<unsigned> bound;
  if (r == 0) bound = 0;  // fiber is exactly {()}
  return UniformProperty::make(
      "rank<=" + std::to_string(r),
      [r](const Partition& lam) { return lam.num_parts() <= r; }, bound, false);
}

inline UniformProperty usize_le(unsigned n) {
  return UniformProperty::make(
      "usize<=" + std::to_string(n),
      [n](const Partition& lam) { return lam.size() <= n; }, n, false);
}

inline UniformProperty uexp_le(unsigned e) {
  std::optional<unsigned> bound;
  if (e == 0) bound = 0;
  return UniformProperty::make(
      "uexp<=" + std::to_string(e),
      [e](const Partition& lam) { return lam.largest_part() <= e; }, bound, false);
}

inline UniformProperty member_of(std::vector<Partition> fiber) {
  unsigned bound = 0;
  std::string name = "member{";
  for (std::size_t i = 0; i < fiber.size(); ++i) {
    bound = std::max(bound, fiber[i].size());
    if (i) name += '|';
    name += fiber[i].text();
  }
  name += '}';
  auto set = std::make_shared<std::vector<Partition>>(std::move(fiber));
  return UniformProperty::make(
      std::move(name),
      [set](const Partition& lam) {
        for (const auto& m : *set)
          if (m == lam) return true;
        return false;
      },
      bound, false);
}

inline UniformProperty and_(const UniformProperty& a, const UniformProperty& b) {
  std::optional<unsigned> bound;
  if (a.finite_fiber_bound() && b.finite_fiber_bound())
    bound = std::min(*a.finite_fiber_bound(), *b.finite_fiber_bound());
  else if (a.finite_fiber_bound())
    bound = a.finite_fiber_bound();
  else if (b.finite_fiber_bound())
    bound = b.finite_fiber_bound();
  return UniformProperty::make(
      "(" + a.name() + "&" + b.name() + ")",
      [a, b](const Partition& lam) { return a(lam) && b(lam); }, bound, false);
}

inline UniformProperty or_(const UniformProperty& a, const UniformProperty& b) {
  std::optional<unsigned> bound;
  if (a.finite_fiber_bound() && b.finite_fiber_bound())
    bound = std::max(*a.finite_fiber_bound(), *b.finite_fiber_bound());
  return UniformProperty::make(
      "(" + a.name() + "|" + b.name() + ")",
      [a, b](const Partition& lam) { return a(lam) || b(lam); }, bound, false);
}

// Partition-level complement. This is itself a uniform property whose fiber
// is "every p-part fails E"; it is NOT the complement of O(E). Complements
// of fibers live in DSet.
inline UniformProperty not_local(const UniformProperty& a) {
  return UniformProperty::make(
      "!(" + a.name() + ")", [a](const Partition& lam) { return !a(lam); });
}

// Def of uniformity: E holds on G iff E holds on every p-part; primes not
// stored in G carry the empty partition, checked once.
inline bool holds_globally(const UniformProperty& e, const FinAbGroup& g) {
  if (!e(Partition())) return false;
  for (const auto& [p, lam] : g.local_parts())
    if (!e(lam)) return false;
  return true;
}

// O(E_1,...,E_r) = union of the fibers.
struct OSet {
  std::vector<UniformProperty> members;
};

inline bool oset_membership(const OSet& s, const FinAbGroup& g) {
  for (const auto& e : s.members)
    if (holds_globally(e, g)) return true;
  return false;
}

// D(E_1,...,E_r; F_1,...,F_s) = O(E_i) \ O(F_j).
struct DSet {
  std::vector<UniformProperty> positives;
  std::vector<UniformProperty> negatives;
};

// Rewrites the negatives as F_j & E_i over all pairs, which leaves the set
// unchanged but enforces O(negatives) subset-of O(positives), the
// precondition for measuring a difference as a difference of measures.
inline DSet normalize(const DSet& d) {
  if (d.negatives.empty()) return d;
  DSet out;
  out.positives = d.positives;
  for (const auto& f : d.negatives)
    for (const auto& e : d.positives) out.negatives.push_back(and_(f, e));
  return out;
}

inline bool dset_membership(const DSet& d, const FinAbGroup& g) {
  bool in_pos = false;
  for (const auto& e : d.positives)
    if (holds_globally(e, g)) {
      in_pos = true;
      break;
    }
  if (!in_pos) return false;
  for (const auto& f : d.negatives)
    if (holds_globally(f, g)) return false;
  return true;
}

}  // namespace clh
