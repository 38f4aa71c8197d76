#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace mgk {

// Exact arithmetic everywhere; no floating point in the core.
using Rational = mpq_class;

// Accepts "p/q" or an integer string, optional leading '-'. Result is canonical.
Rational parse_rational(std::string_view text);

// num/den in canonical form; den > 0.
inline Rational fraction(long num, unsigned long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// "p/q", or "p" for integers.
std::string to_string(const Rational& value);

inline const Rational& zero() {
  static const Rational z(0);
  return z;
}

inline const Rational& one() {
  static const Rational o(1);
  return o;
}

}  // namespace mgk
