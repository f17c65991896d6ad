#pragma once

// Exact rational scalars on top of GMP. Everything that feeds an enclosure
// is computed in mpq/mpz; doubles appear only in statistical summaries and
// in the informational "approx" output fields.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clh {

using Rat = mpq_class;
using Int = mpz_class;

// Thrown when a computation would exceed an explicit budget or cap. Budgets
// are never silently enlarged and never silently truncated.
class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Int make_int(std::uint64_t v) {
  static_assert(sizeof(unsigned long) == 8, "LP64 assumed");
  return Int(static_cast<unsigned long>(v));
}

inline Rat make_rat(long num, long den = 1) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat make_rat(const Int& num, const Int& den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Int int_pow(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int int_pow(std::uint64_t base, unsigned long e) {
  return int_pow(make_int(base), e);
}

inline Rat rat_pow(const Rat& base, unsigned long e) {
  return make_rat(int_pow(Int(base.get_num()), e), int_pow(Int(base.get_den()), e));
}

inline std::string rational_string(const Rat& q) {
  return q.get_str();  // "num/den", or "num" when den == 1
}

// Decimal rendering of an exact rational, truncated toward zero. Used for
// the informational "approx" fields; the authoritative values are the
// rational strings.
inline std::string decimal_string(const Rat& q, int digits = 9) {
  Int num(q.get_num()), den(q.get_den());
  std::string out;
  if (num < 0) {
    out += '-';
    num = -num;
  }
  Int ip = num / den;
  Int rem = num - ip * den;
  out += ip.get_str();
  if (digits <= 0) return out;
  out += '.';
  for (int i = 0; i < digits; ++i) {
    rem *= 10;
    Int d = rem / den;
    rem -= d * den;
    out += static_cast<char>('0' + d.get_ui());
  }
  return out;
}

// Accepts "num/den", a plain integer, or a decimal like "0.4357".
inline Rat parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    bool neg = false;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
      neg = digits[0] == '-';
      digits.erase(digits.begin());
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad decimal literal: " + s);
    Rat r(Int(digits, 10), int_pow(Int(10), frac_len));
    r.canonicalize();
    return neg ? Rat(-r) : r;
  }
  try {
    Rat r(s);
    r.canonicalize();
    if (r.get_den() <= 0) throw std::invalid_argument("nonpositive denominator");
    return r;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad rational literal: " + s);
  }
}

}  // namespace clh
