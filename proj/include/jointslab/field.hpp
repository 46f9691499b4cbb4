#pragma once

// Exact scalar fields: prime fields F_p and the rationals.
//
// Scalars are value types. The field is fixed by the scalar type (ModP or
// Rational); a prime field additionally carries its modulus at runtime, so
// elements of F_5 and F_7 share a type but never mix.

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <climits>
#include <compare>
#include <concepts>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>

#include "jointslab/errors.hpp"

namespace jlab {

using BigInt = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

inline void hash_combine(std::size_t& seed, std::size_t value) {
  seed ^= value + 0x9e3779b97f4a7c15ULL + (seed << 6U) + (seed >> 2U);
}

/// Parses "a", "-a", "a/b" into a reduced rational. Throws ValidationError.
inline BigRational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) -> BigInt {
    std::size_t i = 0;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) throw ValidationError("malformed scalar '" + std::string(text) + "'");
    for (std::size_t j = i; j < s.size(); ++j) {
      if (s[j] < '0' || s[j] > '9') throw ValidationError("malformed scalar '" + std::string(text) + "'");
    }
    return BigInt(std::string(s[0] == '+' ? s.substr(1) : s));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return BigRational(parse_int(text));
  const BigInt num = parse_int(text.substr(0, slash));
  const BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ValidationError("zero denominator in scalar '" + std::string(text) + "'");
  return BigRational(num, den);
}

}  // namespace detail

/// Deterministic Miller-Rabin; the witness set below is exact for all 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = detail::powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

class ModP;

class FieldSpec {
 public:
  enum class Kind { prime, rational };

  static FieldSpec prime(std::uint64_t p) {
    if (!jlab::is_prime(p)) throw ValidationError("field modulus " + std::to_string(p) + " is not prime");
    if (p >= (1ULL << 62U)) throw ValidationError("field modulus must be below 2^62");
    return FieldSpec(Kind::prime, p);
  }
  static FieldSpec rational() noexcept { return FieldSpec(Kind::rational, 0); }

  Kind kind() const noexcept { return kind_; }
  bool is_prime() const noexcept { return kind_ == Kind::prime; }
  bool is_rational() const noexcept { return kind_ == Kind::rational; }
  /// p for F_p, 0 for the rationals.
  std::uint64_t characteristic() const noexcept { return modulus_; }
  std::uint64_t modulus() const noexcept { return modulus_; }

  std::string name() const { return is_prime() ? "F_" + std::to_string(modulus_) : std::string("Q"); }

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

 private:
  friend class ModP;
  FieldSpec(Kind kind, std::uint64_t p) : kind_(kind), modulus_(p) {}

  Kind kind_;
  std::uint64_t modulus_;
};

/// Element of F_p, stored as its canonical residue in [0, p).
class ModP {
 public:
  static ModP from_int(const FieldSpec& f, std::int64_t v) {
    require_prime(f);
    const auto p = static_cast<std::int64_t>(f.modulus());
    std::int64_t r = v % p;
    if (r < 0) r += p;
    return ModP(static_cast<std::uint64_t>(r), f.modulus());
  }
  static ModP from_big(const FieldSpec& f, const BigInt& v) {
    require_prime(f);
    BigInt r = v % BigInt(f.modulus());
    if (r < 0) r += f.modulus();
    return ModP(r.convert_to<std::uint64_t>(), f.modulus());
  }
  static ModP from_rational(const FieldSpec& f, const BigRational& q) {
    const ModP num = from_big(f, boost::multiprecision::numerator(q));
    const ModP den = from_big(f, boost::multiprecision::denominator(q));
    if (den.is_zero()) throw ValidationError("denominator vanishes in " + f.name());
    return num / den;
  }
  static ModP parse(const FieldSpec& f, std::string_view text) {
    return from_rational(f, detail::parse_rational(text));
  }
  static ModP zero(const FieldSpec& f) { return from_int(f, 0); }
  static ModP one(const FieldSpec& f) { return from_int(f, 1); }

  FieldSpec field() const noexcept { return FieldSpec(FieldSpec::Kind::prime, p_); }
  std::uint64_t residue() const noexcept { return v_; }
  bool is_zero() const noexcept { return v_ == 0; }

  ModP inverse() const {
    if (v_ == 0) throw PreconditionViolation("inverse of zero");
    return ModP(detail::powmod(v_, p_ - 2, p_), p_);
  }

  ModP operator-() const noexcept { return ModP(v_ == 0 ? 0 : p_ - v_, p_); }
  ModP& operator+=(const ModP& o) noexcept {
    v_ = (v_ >= p_ - o.v_) ? v_ - (p_ - o.v_) : v_ + o.v_;
    return *this;
  }
  ModP& operator-=(const ModP& o) noexcept {
    v_ = (v_ >= o.v_) ? v_ - o.v_ : v_ + (p_ - o.v_);
    return *this;
  }
  ModP& operator*=(const ModP& o) noexcept {
    v_ = detail::mulmod(v_, o.v_, p_);
    return *this;
  }
  ModP& operator/=(const ModP& o) { return *this *= o.inverse(); }

  friend ModP operator+(ModP a, const ModP& b) noexcept { return a += b; }
  friend ModP operator-(ModP a, const ModP& b) noexcept { return a -= b; }
  friend ModP operator*(ModP a, const ModP& b) noexcept { return a *= b; }
  friend ModP operator/(ModP a, const ModP& b) { return a /= b; }
  friend bool operator==(const ModP&, const ModP&) = default;

  /// Order of canonical representatives (not a field order).
  std::strong_ordering compare(const ModP& o) const noexcept { return v_ <=> o.v_; }
  BigRational lift() const { return BigRational(BigInt(v_)); }
  std::string str() const { return std::to_string(v_); }
  std::size_t hash() const noexcept { return std::hash<std::uint64_t>{}(v_); }

 private:
  ModP(std::uint64_t v, std::uint64_t p) : v_(v), p_(p) {}
  static void require_prime(const FieldSpec& f) {
    if (!f.is_prime()) throw PreconditionViolation("ModP requires a prime field, got " + f.name());
  }

  std::uint64_t v_;
  std::uint64_t p_;
};

/// Element of Q, always fully reduced with positive denominator.
class Rational {
 public:
  Rational() = default;
  explicit Rational(BigRational v) : v_(std::move(v)) {}

  static Rational from_int(const FieldSpec& f, std::int64_t v) {
    require_rational(f);
    return Rational(BigRational(v));
  }
  static Rational from_big(const FieldSpec& f, const BigInt& v) {
    require_rational(f);
    return Rational(BigRational(v));
  }
  static Rational from_rational(const FieldSpec& f, const BigRational& q) {
    require_rational(f);
    return Rational(q);
  }
  static Rational parse(const FieldSpec& f, std::string_view text) {
    require_rational(f);
    return Rational(detail::parse_rational(text));
  }
  static Rational zero(const FieldSpec& f) { return from_int(f, 0); }
  static Rational one(const FieldSpec& f) { return from_int(f, 1); }

  FieldSpec field() const noexcept { return FieldSpec::rational(); }
  const BigRational& value() const noexcept { return v_; }
  bool is_zero() const { return v_.is_zero(); }

  Rational inverse() const {
    if (is_zero()) throw PreconditionViolation("inverse of zero");
    return Rational(1 / v_);
  }

  Rational operator-() const { return Rational(-v_); }
  Rational& operator+=(const Rational& o) {
    v_ += o.v_;
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    v_ -= o.v_;
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    v_ *= o.v_;
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw PreconditionViolation("division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }

  std::strong_ordering compare(const Rational& o) const {
    if (v_ < o.v_) return std::strong_ordering::less;
    if (o.v_ < v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  BigRational lift() const { return v_; }
  std::string str() const { return v_.str(); }
  std::size_t hash() const { return boost::multiprecision::hash_value(v_); }

 private:
  static void require_rational(const FieldSpec& f) {
    if (!f.is_rational()) throw PreconditionViolation("Rational requires the rational field, got " + f.name());
  }

  BigRational v_;
};

template <class S>
concept FieldScalar = std::copyable<S> && std::equality_comparable<S> &&
                      requires(const S a, const S b, const FieldSpec& f, std::string_view text) {
                        { S::from_int(f, std::int64_t{0}) } -> std::same_as<S>;
                        { S::from_rational(f, BigRational{}) } -> std::same_as<S>;
                        { S::parse(f, text) } -> std::same_as<S>;
                        { a + b } -> std::same_as<S>;
                        { a - b } -> std::same_as<S>;
                        { a * b } -> std::same_as<S>;
                        { a / b } -> std::same_as<S>;
                        { -a } -> std::same_as<S>;
                        { a.is_zero() } -> std::convertible_to<bool>;
                        { a.field() } -> std::same_as<FieldSpec>;
                        { a.str() } -> std::convertible_to<std::string>;
                        { a.hash() } -> std::convertible_to<std::size_t>;
                        { a.compare(b) } -> std::same_as<std::strong_ordering>;
                        { a.lift() } -> std::same_as<BigRational>;
                      };

static_assert(FieldScalar<ModP>);
static_assert(FieldScalar<Rational>);

/// Calls fn with a default-constructed tag of the scalar type matching `field`.
/// `fn` must be a generic lambda taking `auto tag`; use `decltype(tag)::type`.
template <class S>
struct ScalarTag {
  using type = S;
};

template <class Fn>
decltype(auto) dispatch_field(const FieldSpec& field, Fn&& fn) {
  if (field.is_prime()) return std::forward<Fn>(fn)(ScalarTag<ModP>{});
  return std::forward<Fn>(fn)(ScalarTag<Rational>{});
}

/// Integer binomial coefficient; throws TooLarge on 64-bit overflow.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > UINT64_MAX) throw TooLarge("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(acc);
}

}  // namespace jlab
