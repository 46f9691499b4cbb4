#pragma once

// Shared helpers for the unit tests: seeded random objects and small
// brute-force oracles that do not go through the library's fast paths.

#include <cstdint>
#include <random>
#include <vector>

#include "jointslab/field.hpp"
#include "jointslab/linalg.hpp"
#include "jointslab/configuration.hpp"
#include "jointslab/polynomial.hpp"
#include "jointslab/rng.hpp"

namespace jlab::testing {

template <FieldScalar S>
MultiPoly<S> random_poly(const FieldSpec& f, std::size_t n, std::mt19937_64& rng, unsigned max_exp = 4,
                         unsigned max_terms = 6, unsigned exp_step = 1) {
  MultiPoly<S> p(f, n);
  const unsigned terms = 1 + rng() % max_terms;
  for (unsigned t = 0; t < terms; ++t) {
    Exponent e(n);
    for (auto& a : e) a = exp_step * static_cast<unsigned>(rng() % (max_exp + 1));
    const auto c = static_cast<std::int64_t>(rng() % 11) - 5;
    p.add_term(e, S::from_int(f, c));
  }
  return p;
}

template <FieldScalar S>
Vec<S> random_vec(const FieldSpec& f, std::size_t n, std::mt19937_64& rng, std::int64_t range = 7) {
  Vec<S> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(S::from_int(f, static_cast<std::int64_t>(rng() % (2 * range + 1)) - range));
  return v;
}

/// p(x + z) in 2n variables (x first, then z), by substitution and expansion.
template <FieldScalar S>
MultiPoly<S> shift_expand(const MultiPoly<S>& p) {
  const auto& f = p.field();
  const std::size_t n = p.nvars();
  MultiPoly<S> out(f, 2 * n);
  for (const auto& [e, c] : p.terms()) {
    auto term = MultiPoly<S>::constant(f, 2 * n, c);
    for (std::size_t i = 0; i < n; ++i) {
      const auto sum = MultiPoly<S>::variable(f, 2 * n, i) + MultiPoly<S>::variable(f, 2 * n, n + i);
      for (unsigned k = 0; k < e[i]; ++k) term = term * sum;
    }
    out += term;
  }
  return out;
}

/// Coefficient of z_i (to the first power, no other z) in p(x + z), as a polynomial in x.
template <FieldScalar S>
MultiPoly<S> first_order_coefficient(const MultiPoly<S>& p, std::size_t i) {
  const std::size_t n = p.nvars();
  const auto expanded = shift_expand(p);
  MultiPoly<S> out(p.field(), n);
  for (const auto& [e, c] : expanded.terms()) {
    bool match = true;
    for (std::size_t j = 0; j < n; ++j) match = match && e[n + j] == (j == i ? 1u : 0u);
    if (!match) continue;
    out.add_term(Exponent(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(n)), c);
  }
  return out;
}

/// Three families over F_p: in each plane z = 0..planes-1, `a` lines along e1
/// and `b` lines along e2 at seeded random offsets, plus the vertical line
/// through every crossing. Multijoints are the crossings; with a > C^2 * planes
/// the degree-reduction sampling probability stays below 1.
inline Configuration<ModP> plane_stack(const FieldSpec& f, std::int64_t planes, std::size_t a, std::size_t b,
                                       std::uint64_t seed) {
  Configuration<ModP> c(f, 3);
  const auto f1 = c.add_family("L1");
  const auto f2 = c.add_family("L2");
  const auto f3 = c.add_family("L3");
  Rng rng(seed);
  const std::uint64_t p = f.modulus();
  std::vector<std::int64_t> values(p);
  auto pick = [&](std::size_t count) {
    for (std::uint64_t i = 0; i < p; ++i) values[i] = static_cast<std::int64_t>(i);
    for (std::uint64_t i = p - 1; i > 0; --i) std::swap(values[i], values[uniform_below(rng, i + 1)]);
    return std::vector<std::int64_t>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(count));
  };
  for (std::int64_t z = 0; z < planes; ++z) {
    const auto ys = pick(a);
    const auto xs = pick(b);
    for (auto y : ys) c.add_line(f1, Line<ModP>(make_vec<ModP>(f, {0, y, z}), unit_vec<ModP>(f, 3, 0)));
    for (auto x : xs) c.add_line(f2, Line<ModP>(make_vec<ModP>(f, {x, 0, z}), unit_vec<ModP>(f, 3, 1)));
    for (auto x : xs) {
      for (auto y : ys) c.add_line(f3, Line<ModP>(make_vec<ModP>(f, {x, y, 0}), unit_vec<ModP>(f, 3, 2)));
    }
  }
  return c;
}

}  // namespace jlab::testing
