#pragma once

// Sparse multivariate polynomials over an exact field.
//
// Terms are keyed by dense exponent vectors (n <= kMaxVariables) and kept in
// descending graded-lex order, which is also the canonical text order:
//
//   3 * x1^2 x3^1 + 4/5 * x2^1 + 1
//
// Only variables with a positive exponent are printed; the zero polynomial
// prints as "0".

#include <climits>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"
#include "jointslab/linalg.hpp"

namespace jlab {

inline constexpr std::size_t kMaxVariables = 8;

using Exponent = std::vector<unsigned>;

inline unsigned total_degree(const Exponent& e) {
  unsigned s = 0;
  for (auto a : e) s += a;
  return s;
}

/// Graded lexicographic order with x1 > x2 > ... > xn.
inline bool grlex_less(const Exponent& a, const Exponent& b) {
  const auto da = total_degree(a);
  const auto db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

struct GrlexGreater {
  bool operator()(const Exponent& a, const Exponent& b) const { return grlex_less(b, a); }
};

/// Total degree with a sentinel for the zero polynomial that compares below every integer.
class Degree {
 public:
  constexpr Degree(int d) : v_(d) {}  // NOLINT(google-explicit-constructor)
  static constexpr Degree minus_infinity() { return Degree(INT_MIN); }

  constexpr bool is_minus_infinity() const { return v_ == INT_MIN; }
  int value() const {
    if (is_minus_infinity()) throw PreconditionViolation("degree of the zero polynomial");
    return v_;
  }
  std::string str() const { return is_minus_infinity() ? "-inf" : std::to_string(v_); }

  friend constexpr auto operator<=>(Degree, Degree) = default;

 private:
  int v_;
};

/// Number of monomials of total degree <= d in n variables, C(d + n, n).
inline std::uint64_t monomial_count(std::uint64_t d, std::uint64_t n) { return binomial(d + n, n); }

/// Exponent vectors of total degree <= d in ascending graded-lex order.
inline std::vector<Exponent> monomials_up_to(unsigned d, std::size_t n) {
  std::vector<Exponent> out;
  for (unsigned deg = 0; deg <= d; ++deg) {
    // all compositions of deg into n parts, lexicographically ascending
    std::vector<Exponent> level;
    Exponent e(n, 0);
    auto rec = [&](auto&& self, std::size_t i, unsigned remaining) -> void {
      if (i + 1 == n) {
        e[i] = remaining;
        level.push_back(e);
        return;
      }
      for (unsigned a = 0; a <= remaining; ++a) {
        e[i] = a;
        self(self, i + 1, remaining - a);
      }
    };
    if (n == 0) {
      if (deg == 0) level.push_back(e);
    } else {
      rec(rec, 0, deg);
    }
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

template <FieldScalar S>
class MultiPoly {
 public:
  using TermMap = std::map<Exponent, S, GrlexGreater>;

  MultiPoly(FieldSpec field, std::size_t nvars) : field_(field), n_(nvars) {
    if (nvars > kMaxVariables) throw PreconditionViolation("at most 8 variables are supported");
  }

  static MultiPoly constant(FieldSpec field, std::size_t nvars, const S& c) {
    MultiPoly p(field, nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }
  static MultiPoly variable(FieldSpec field, std::size_t nvars, std::size_t i) {
    MultiPoly p(field, nvars);
    Exponent e(nvars, 0);
    e.at(i) = 1;
    p.add_term(e, S::from_int(field, 1));
    return p;
  }
  /// Polynomial whose coefficient on monomials[i] is coeffs[i].
  static MultiPoly from_coefficients(FieldSpec field, std::size_t nvars, const std::vector<Exponent>& monomials,
                                     const Vec<S>& coeffs) {
    MultiPoly p(field, nvars);
    for (std::size_t i = 0; i < monomials.size(); ++i) p.add_term(monomials[i], coeffs[i]);
    return p;
  }

  const FieldSpec& field() const noexcept { return field_; }
  std::size_t nvars() const noexcept { return n_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  Degree degree() const {
    if (terms_.empty()) return Degree::minus_infinity();
    return static_cast<int>(total_degree(terms_.begin()->first));
  }

  S coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? S::from_int(field_, 0) : it->second;
  }

  void add_term(const Exponent& e, const S& c) {
    if (e.size() != n_) throw PreconditionViolation("exponent length does not match variable count");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_compatible(b);
    MultiPoly out(a.field_, a.n_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponent e(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }
  friend MultiPoly operator*(const S& s, const MultiPoly& p) {
    MultiPoly out(p.field_, p.n_);
    for (const auto& [e, c] : p.terms_) out.add_term(e, s * c);
    return out;
  }
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.field_ == b.field_ && a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  S eval(const Vec<S>& x) const {
    if (x.size() != n_) throw PreconditionViolation("evaluation point has wrong dimension");
    S acc = S::from_int(field_, 0);
    for (const auto& [e, c] : terms_) {
      S term = c;
      for (std::size_t i = 0; i < n_; ++i) {
        for (unsigned k = 0; k < e[i]; ++k) term *= x[i];
      }
      acc += term;
    }
    return acc;
  }

  /// Univariate polynomial t -> p(anchor + t * dir), expanded exactly.
  MultiPoly restrict_to_line(const Vec<S>& anchor, const Vec<S>& dir) const {
    if (anchor.size() != n_ || dir.size() != n_) throw PreconditionViolation("line has wrong dimension");
    // powers[i][k] = coefficients of (anchor_i + dir_i t)^k
    std::vector<std::vector<Vec<S>>> powers(n_);
    const S zero = S::from_int(field_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      unsigned max_exp = 0;
      for (const auto& [e, c] : terms_) max_exp = std::max(max_exp, e[i]);
      powers[i].push_back(Vec<S>{S::from_int(field_, 1)});
      for (unsigned k = 1; k <= max_exp; ++k) {
        const Vec<S>& prev = powers[i].back();
        Vec<S> next(prev.size() + 1, zero);
        for (std::size_t j = 0; j < prev.size(); ++j) {
          next[j] += prev[j] * anchor[i];
          next[j + 1] += prev[j] * dir[i];
        }
        powers[i].push_back(std::move(next));
      }
    }
    Vec<S> acc(1, zero);
    for (const auto& [e, c] : terms_) {
      Vec<S> prod{c};
      for (std::size_t i = 0; i < n_; ++i) {
        if (e[i] == 0) continue;
        const Vec<S>& f = powers[i][e[i]];
        Vec<S> next(prod.size() + f.size() - 1, zero);
        for (std::size_t a = 0; a < prod.size(); ++a) {
          if (prod[a].is_zero()) continue;
          for (std::size_t b = 0; b < f.size(); ++b) next[a + b] += prod[a] * f[b];
        }
        prod = std::move(next);
      }
      if (acc.size() < prod.size()) acc.resize(prod.size(), zero);
      for (std::size_t k = 0; k < prod.size(); ++k) acc[k] += prod[k];
    }
    MultiPoly out(field_, 1);
    for (std::size_t k = 0; k < acc.size(); ++k) out.add_term(Exponent{static_cast<unsigned>(k)}, acc[k]);
    return out;
  }

  /// Hasse derivative of multi-order `order`: the coefficient of z^order in p(x + z).
  /// x^a contributes C(a, order) x^(a - order), with the binomials reduced in the field.
  MultiPoly hasse_derivative(const Exponent& order) const {
    if (order.size() != n_) throw PreconditionViolation("derivative order has wrong length");
    MultiPoly out(field_, n_);
    for (const auto& [e, c] : terms_) {
      BigInt coef = 1;
      Exponent reduced(n_);
      bool survives = true;
      for (std::size_t i = 0; i < n_; ++i) {
        if (e[i] < order[i]) {
          survives = false;
          break;
        }
        coef *= big_binomial(e[i], order[i]);
        reduced[i] = e[i] - order[i];
      }
      if (!survives) continue;
      out.add_term(reduced, S::from_rational(field_, BigRational(coef)) * c);
    }
    return out;
  }

  /// First-order Hasse derivatives, one per variable.
  std::vector<MultiPoly> hasse_gradient() const {
    std::vector<MultiPoly> grad;
    grad.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      Exponent order(n_, 0);
      order[i] = 1;
      grad.push_back(hasse_derivative(order));
    }
    return grad;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      if (!first) s += " + ";
      first = false;
      s += c.str();
      bool star = false;
      for (std::size_t i = 0; i < n_; ++i) {
        if (e[i] == 0) continue;
        s += star ? " " : " * ";
        star = true;
        s += "x" + std::to_string(i + 1) + "^" + std::to_string(e[i]);
      }
    }
    return s;
  }

  /// Inverse of str(). Accepts any term order; repeated monomials are summed.
  static MultiPoly parse(FieldSpec field, std::size_t nvars, std::string_view text) {
    MultiPoly p(field, nvars);
    if (text == "0") return p;
    auto fail = [&](const std::string& why) {
      return ValidationError("malformed polynomial '" + std::string(text) + "': " + why);
    };
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto next = text.find(" + ", pos);
      std::string_view term = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
      const auto star = term.find(" * ");
      const std::string_view coef_text = term.substr(0, star);
      S coef = S::parse(field, coef_text);
      Exponent e(nvars, 0);
      if (star != std::string_view::npos) {
        std::istringstream factors{std::string(term.substr(star + 3))};
        std::string factor;
        while (factors >> factor) {
          const auto caret = factor.find('^');
          if (factor.size() < 4 || factor[0] != 'x' || caret == std::string::npos) throw fail("bad factor " + factor);
          std::size_t var = 0;
          unsigned exp = 0;
          try {
            var = std::stoul(factor.substr(1, caret - 1));
            exp = static_cast<unsigned>(std::stoul(factor.substr(caret + 1)));
          } catch (const std::exception&) {
            throw fail("bad factor " + factor);
          }
          if (var < 1 || var > nvars) throw fail("variable index out of range");
          e[var - 1] += exp;
        }
      }
      p.add_term(e, coef);
      if (next == std::string_view::npos) break;
      pos = next + 3;
    }
    return p;
  }

 private:
  static BigInt big_binomial(unsigned n, unsigned k) {
    BigInt r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }
  void check_compatible(const MultiPoly& o) const {
    if (!(field_ == o.field_) || n_ != o.n_) throw PreconditionViolation("incompatible polynomials");
  }

  FieldSpec field_;
  std::size_t n_;
  TermMap terms_;
};

}  // namespace jlab
