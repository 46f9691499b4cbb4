#pragma once

// High-precision reals for fractional powers and ratios. Values carry 50
// significant decimal digits; comparisons that must be trusted go through
// certainly_less(), which refuses to decide inside a 1e-30 relative band.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

#include "jointslab/field.hpp"

namespace jlab {

using Real = boost::multiprecision::cpp_bin_float_50;

inline Real to_real(const BigRational& q) {
  return Real(boost::multiprecision::numerator(q)) / Real(boost::multiprecision::denominator(q));
}

inline Real to_real(const BigInt& z) { return Real(z); }

/// Decimal rendering with `digits` significant digits (default 30).
inline std::string real_str(const Real& x, int digits = 30) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

inline Real relative_band(const Real& a, const Real& b) {
  using boost::multiprecision::abs;
  Real scale = abs(a) > abs(b) ? abs(a) : abs(b);
  if (scale < 1) scale = 1;
  return scale * Real("1e-30");
}

/// a < b with a margin: false when the two are within rounding distance.
inline bool certainly_less(const Real& a, const Real& b) { return b - a > relative_band(a, b); }

/// Largest r >= 0 with r^k <= x, for x >= 0.
inline BigInt integer_root(const BigInt& x, unsigned k) {
  if (x < 0) throw PreconditionViolation("integer_root of a negative number");
  if (x < 2 || k == 1) return x;
  // start from a floating estimate and correct exactly
  BigInt r(boost::multiprecision::pow(to_real(x), Real(1) / Real(k)).convert_to<BigInt>());
  auto pw = [&](const BigInt& b) { return boost::multiprecision::pow(b, k); };
  while (r > 0 && pw(r) > x) --r;
  while (pw(r + 1) <= x) ++r;
  return r;
}

/// x^(num/den) when it is rational, else nullopt. x >= 0.
inline std::optional<BigRational> exact_power(const BigRational& x, unsigned num, unsigned den) {
  if (x < 0) return std::nullopt;
  const BigInt a = boost::multiprecision::numerator(x);
  const BigInt b = boost::multiprecision::denominator(x);
  const BigInt ra = integer_root(a, den);
  const BigInt rb = integer_root(b, den);
  if (boost::multiprecision::pow(ra, den) != a || boost::multiprecision::pow(rb, den) != b) return std::nullopt;
  return BigRational(boost::multiprecision::pow(ra, num), boost::multiprecision::pow(rb, num));
}

/// A value that is exact when possible and otherwise a 50-digit approximation.
struct Number {
  Real approx;
  std::optional<BigRational> exact;

  static Number of(const BigRational& q) { return {to_real(q), q}; }
  static Number power(const BigRational& x, unsigned num, unsigned den) {
    if (auto e = exact_power(x, num, den)) return of(*e);
    return {boost::multiprecision::pow(to_real(x), Real(num) / Real(den)), std::nullopt};
  }

  std::string str() const { return exact ? exact->str() : real_str(approx); }

  friend Number operator+(const Number& a, const Number& b) {
    Number r{a.approx + b.approx, std::nullopt};
    if (a.exact && b.exact) r.exact = *a.exact + *b.exact;
    return r;
  }
  friend Number operator/(const Number& a, const Number& b) {
    Number r{a.approx / b.approx, std::nullopt};
    if (a.exact && b.exact) r.exact = *a.exact / *b.exact;
    return r;
  }
};

}  // namespace jlab
