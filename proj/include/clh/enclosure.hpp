#pragma once

// Rational interval enclosures. An Enclosure [lo, hi] is a guarantee that
// the mathematically exact value lies inside the interval. Because the
// endpoints are exact rationals, interval arithmetic here is itself exact;
// no rounding step is needed for +, -, *.

#include "clh/rational.hpp"

#include <algorithm>
#include <stdexcept>

namespace clh {

struct Enclosure {
  Rat lo;
  Rat hi;

  Enclosure() : lo(0), hi(0) {}
  Enclosure(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw std::invalid_argument("enclosure endpoints out of order");
  }

  static Enclosure point(const Rat& v) { return Enclosure(v, v); }

  Rat width() const { return hi - lo; }
  Rat midpoint() const { return (lo + hi) / 2; }

  bool contains(const Rat& v) const { return lo <= v && v <= hi; }
  bool contains(const Enclosure& other) const { return lo <= other.lo && other.hi <= hi; }
  bool intersects(const Enclosure& other) const { return lo <= other.hi && other.lo <= hi; }

  friend bool operator==(const Enclosure&, const Enclosure&) = default;
};

inline Enclosure operator+(const Enclosure& a, const Enclosure& b) {
  return Enclosure(a.lo + b.lo, a.hi + b.hi);
}

inline Enclosure operator-(const Enclosure& a, const Enclosure& b) {
  return Enclosure(a.lo - b.hi, a.hi - b.lo);
}

inline Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  Rat p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return Enclosure(std::min(std::min(p1, p2), std::min(p3, p4)),
                   std::max(std::max(p1, p2), std::max(p3, p4)));
}

inline Enclosure scale(const Enclosure& a, const Rat& c) {
  if (c >= 0) return Enclosure(a.lo * c, a.hi * c);
  return Enclosure(a.hi * c, a.lo * c);
}

// Restricts a probability enclosure to [0, 1]. Weight enclosures are never
// clamped; only probabilities are.
inline Enclosure clamp01(const Enclosure& a) {
  Rat lo = std::max(a.lo, Rat(0));
  Rat hi = std::min(a.hi, Rat(1));
  if (lo > hi) {
    // The exact interval lies outside [0,1]; collapse to the nearer bound.
    return a.hi < 0 ? Enclosure(Rat(0), Rat(0)) : Enclosure(Rat(1), Rat(1));
  }
  return Enclosure(lo, hi);
}

// Truncation budgets for everything with an infinite tail.
//
// partition_cap: partitions of size <= partition_cap enter fiber sums
// exactly; the rest is covered by an explicit tail bound.
//
// product_depth D: local normalizer products carry exact factors until the
// relative tail slack is <= 2^-D. For p = 2 this takes exactly D factors;
// larger primes need fewer.
struct Budget {
  unsigned partition_cap = 24;
  unsigned product_depth = 64;

  void validate() const {
    if (partition_cap < 1 || product_depth < 1)
      throw std::invalid_argument("budget fields must be positive");
  }
};

}  // namespace clh
