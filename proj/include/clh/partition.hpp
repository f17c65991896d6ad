#pragma once

// Integer partitions: the universal index set for isomorphism classes of
// finite abelian p-groups. The enumeration order (descending lexicographic)
// is part of the contract; the sampler's inversion tables index into it.

#include "clh/rational.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace clh {

// Enumerating partitions of n > kEnumerationCap is refused, never silent.
inline constexpr unsigned kEnumerationCap = 64;

class Partition {
 public:
  Partition() = default;

  explicit Partition(std::vector<unsigned> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] < 1) throw std::invalid_argument("partition parts must be positive");
      if (i + 1 < parts_.size() && parts_[i] < parts_[i + 1])
        throw std::invalid_argument("partition parts must be weakly decreasing");
    }
  }

  // Text form: comma-separated parts in canonical order, "()" for empty.
  static Partition parse(std::string_view text) {
    if (text == "()") return Partition();
    std::vector<unsigned> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      std::string_view tok = text.substr(pos, comma == std::string_view::npos ? comma : comma - pos);
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string_view::npos)
        throw std::invalid_argument("bad partition text: \"" + std::string(text) + "\"");
      unsigned long v = std::stoul(std::string(tok));
      if (v < 1 || v > kEnumerationCap)
        throw std::invalid_argument("partition part out of range: " + std::string(tok));
      parts.push_back(static_cast<unsigned>(v));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    return Partition(std::move(parts));
  }

  std::string text() const {
    if (parts_.empty()) return "()";
    std::string out;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(parts_[i]);
    }
    return out;
  }

  const std::vector<unsigned>& parts() const { return parts_; }
  std::size_t num_parts() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  unsigned largest_part() const { return parts_.empty() ? 0u : parts_.front(); }

  unsigned size() const {
    unsigned s = 0;
    for (unsigned p : parts_) s += p;
    return s;
  }

  Partition conjugate() const {
    std::vector<unsigned> cols;
    cols.reserve(largest_part());
    for (unsigned c = 1; c <= largest_part(); ++c) {
      unsigned rows = 0;
      for (unsigned p : parts_) {
        if (p >= c) ++rows;
        else break;
      }
      cols.push_back(rows);
    }
    return Partition(std::move(cols));
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  // Lexicographic on the part vectors; enumeration emits partitions of equal
  // size in strictly decreasing order under this comparison.
  friend std::strong_ordering operator<=>(const Partition& a, const Partition& b) = default;

 private:
  std::vector<unsigned> parts_;
};

struct ShapeStats {
  unsigned size;
  std::size_t num_parts;
  unsigned largest_part;
  Partition conjugate;
};

inline ShapeStats shape_stats(const Partition& lam) {
  return ShapeStats{lam.size(), lam.num_parts(), lam.largest_part(), lam.conjugate()};
}

// All partitions of n, in descending lexicographic order.
inline std::vector<Partition> enumerate_partitions(unsigned n, unsigned cap = kEnumerationCap) {
  if (n > cap)
    throw budget_error("enumerate_partitions: size " + std::to_string(n) +
                       " exceeds budget " + std::to_string(cap));
  std::vector<Partition> out;
  std::vector<unsigned> stack;
  auto rec = [&](auto&& self, unsigned rest, unsigned max_part) -> void {
    if (rest == 0) {
      out.emplace_back(Partition(stack));
      return;
    }
    for (unsigned first = std::min(rest, max_part); first >= 1; --first) {
      stack.push_back(first);
      self(self, rest - first, first);
      stack.pop_back();
    }
  };
  rec(rec, n, n == 0 ? 1 : n);
  return out;
}

// All partitions of size <= n, ordered by size and then descending
// lexicographically within each size.
inline std::vector<Partition> enumerate_partitions_up_to(unsigned n, unsigned cap = kEnumerationCap) {
  std::vector<Partition> out;
  for (unsigned k = 0; k <= n; ++k) {
    auto layer = enumerate_partitions(k, cap);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

// a(n) by the parts-bounded DP table; no partitions are materialized.
inline Int count_partitions(unsigned n) {
  std::vector<Int> dp(n + 1, Int(0));
  dp[0] = 1;
  for (unsigned part = 1; part <= n; ++part)
    for (unsigned k = part; k <= n; ++k) dp[k] += dp[k - part];
  return dp[n];
}

// F_1 = F_2 = 1, F_{n+1} = F_n + F_{n-1}.
inline Int fibonacci(unsigned n) {
  if (n == 0) return 0;
  Int a = 0, b = 1;
  for (unsigned i = 1; i < n; ++i) {
    Int next = a + b;
    a = b;
    b = next;
  }
  return b;
}

}  // namespace clh
