#pragma once

// Generators: axis-parallel grids, visible lattice points and the density
// 1/zeta(d), the lattice bush configuration, and seeded random configurations.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "jointslab/configuration.hpp"
#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"
#include "jointslab/line.hpp"
#include "jointslab/linalg.hpp"
#include "jointslab/numeric.hpp"
#include "jointslab/rng.hpp"

namespace jlab {

namespace detail {

/// Calls fn(point) for every point of {0..sides[0]-1} x ... in lexicographic order.
template <class Fn>
void for_each_lattice_point(const std::vector<std::uint64_t>& sides, Fn&& fn) {
  for (auto s : sides) {
    if (s == 0) return;
  }
  std::vector<std::int64_t> x(sides.size(), 0);
  while (true) {
    fn(static_cast<const std::vector<std::int64_t>&>(x));
    std::size_t i = sides.size();
    while (i > 0) {
      --i;
      if (static_cast<std::uint64_t>(++x[i]) < sides[i]) break;
      x[i] = 0;
      if (i == 0) return;
    }
    if (sides.empty()) return;
  }
}

template <FieldScalar S>
Vec<S> lattice_vec(const FieldSpec& f, const std::vector<std::int64_t>& x) {
  Vec<S> v;
  v.reserve(x.size());
  for (auto c : x) v.push_back(S::from_int(f, c));
  return v;
}

}  // namespace detail

/// Axis-parallel grid on {0..sides[0]-1} x ... x {0..sides[n-1]-1}: family i
/// holds every line in direction e_i through the grid.
template <FieldScalar S>
Configuration<S> box_grid(const std::vector<std::uint64_t>& sides, const FieldSpec& f) {
  const std::size_t n = sides.size();
  for (auto s : sides) {
    if (s < 1) throw PreconditionViolation("grid sides must be positive");
    if (f.is_prime() && f.modulus() <= s) {
      throw FieldTooSmall("grid side " + std::to_string(s) + " needs a field with more than " + std::to_string(s) +
                          " elements, got " + f.name());
    }
  }
  Configuration<S> c(f, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto fam = c.add_family("L" + std::to_string(i + 1));
    auto cross = sides;
    cross[i] = 1;
    detail::for_each_lattice_point(cross, [&](const std::vector<std::int64_t>& x) {
      c.add_line(fam, Line<S>(detail::lattice_vec<S>(f, x), unit_vec<S>(f, n, i)));
    });
  }
  return c;
}

/// n families, N^(n-1) lines each, over the cube {0..N-1}^n.
template <FieldScalar S>
Configuration<S> grid_config(std::uint64_t N, std::size_t n, const FieldSpec& f) {
  if (N < 1) throw PreconditionViolation("grid_config needs N >= 1");
  return box_grid<S>(std::vector<std::uint64_t>(n, N), f);
}

struct VisiblePoints {
  std::vector<std::vector<std::int64_t>> points;  // lexicographic order
  std::uint64_t count = 0;
};

/// Points of {0..N}^d other than 0 whose coordinates have gcd 1.
inline VisiblePoints visible_points(std::uint64_t N, std::size_t d, bool keep_points = true) {
  if (N < 1 || d < 1) throw PreconditionViolation("visible_points needs N >= 1 and d >= 1");
  VisiblePoints out;
  detail::for_each_lattice_point(std::vector<std::uint64_t>(d, N + 1), [&](const std::vector<std::int64_t>& y) {
    std::int64_t g = 0;
    for (auto c : y) g = std::gcd(g, c);
    if (g != 1) return;
    ++out.count;
    if (keep_points) out.points.push_back(y);
  });
  return out;
}

struct ZetaInverse {
  Real value;        // 1 / (sum of m^-d for m <= terms)
  Real lower;        // 1 / (partial sum + integral tail bound)
  Real error_bound;  // value - lower; the true 1/zeta(d) lies in [lower, value]
};

inline ZetaInverse zeta_inverse(unsigned d, std::uint64_t terms) {
  if (d < 2 || terms < 1) throw PreconditionViolation("zeta_inverse needs d >= 2 and terms >= 1");
  Real sum = 0;
  // smallest terms first keeps the rounding error of the running sum small
  for (std::uint64_t m = terms; m >= 1; --m) {
    const Real base(m);
    Real p = base;
    for (unsigned i = 1; i < d; ++i) p *= base;
    sum += 1 / p;
  }
  const Real tail = boost::multiprecision::pow(Real(terms), Real(1) - Real(d)) / Real(d - 1);
  ZetaInverse z{1 / sum, 1 / (sum + tail), 0};
  z.error_bound = z.value - z.lower;
  return z;
}

struct BushStats {
  std::uint64_t N = 0;
  BigRational alpha;
  std::size_t n = 0;
  std::uint64_t radius = 0;  // floor(N^alpha)
  std::uint64_t lambda_size = 0;
  std::uint64_t directions = 0;
  std::uint64_t lines_planar = 0;
  std::uint64_t lines_vertical = 0;
  std::uint64_t k_nominal = 0;
  std::map<std::uint64_t, std::uint64_t> per_point_line_counts;  // lines through a point -> number of points
  std::uint64_t k_median = 0;
  std::uint64_t per_line_points_min = 0;
  std::uint64_t per_line_points_median = 0;
};

namespace detail {

/// Length of the parameter interval of {y + t v} inside [0, N]^m.
inline BigRational box_chord(const std::vector<std::int64_t>& y, const std::vector<std::int64_t>& v, std::int64_t N) {
  bool any = false;
  BigRational lo, hi;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (v[j] == 0) continue;
    // BigInt operands: the built-in-integer constructor mishandles a negative denominator
    BigRational a(BigInt(-y[j]), BigInt(v[j])), b(BigInt(N - y[j]), BigInt(v[j]));
    if (a > b) std::swap(a, b);
    if (!any || a > lo) lo = a;
    if (!any || b < hi) hi = b;
    any = true;
  }
  return hi - lo;
}

inline std::uint64_t lower_median(std::vector<std::uint64_t> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  return xs[(xs.size() - 1) / 2];
}

}  // namespace detail

/// Lattice bush: through each y in {0..N}^(n-1) x {0}, one planar line per
/// visible direction of {0..floor(N^alpha)}^(n-1) (first coordinate flipped
/// when that gives a strictly longer chord of the box) plus one vertical line.
inline std::pair<Configuration<Rational>, BushStats> bush_counterexample(std::uint64_t N, const BigRational& alpha,
                                                                         std::size_t n) {
  if (N < 2) throw PreconditionViolation("bush needs N >= 2");
  if (alpha <= 0 || alpha >= 1) throw PreconditionViolation("bush needs 0 < alpha < 1");
  const FieldSpec f = FieldSpec::rational();
  const std::size_t m = n - 1;

  // radius = largest r with r^den <= N^num
  const auto num = static_cast<unsigned>(boost::multiprecision::numerator(alpha));
  const auto den = static_cast<unsigned>(boost::multiprecision::denominator(alpha));
  const auto radius = integer_root(boost::multiprecision::pow(BigInt(N), num), den).convert_to<std::uint64_t>();
  if (radius < 1) throw PreconditionViolation("floor(N^alpha) must be at least 1");

  BushStats st;
  st.N = N;
  st.alpha = alpha;
  st.n = n;
  st.radius = radius;

  const auto dirs = visible_points(radius, m).points;
  st.directions = dirs.size();

  Configuration<Rational> c(f, n);
  const auto fam = c.add_family("L");
  std::vector<std::vector<std::int64_t>> lambda;
  detail::for_each_lattice_point(std::vector<std::uint64_t>(m, N + 1),
                                 [&](const std::vector<std::int64_t>& y) { lambda.push_back(y); });
  st.lambda_size = lambda.size();

  auto embed = [&](const std::vector<std::int64_t>& x) {
    auto v = x;
    v.push_back(0);
    return detail::lattice_vec<Rational>(f, v);
  };
  for (const auto& y : lambda) {
    const auto anchor = embed(y);
    for (const auto& v : dirs) {
      auto dir = v;
      if (v[0] != 0) {
        auto flipped = v;
        flipped[0] = -v[0];
        if (detail::box_chord(y, flipped, static_cast<std::int64_t>(N)) >
            detail::box_chord(y, v, static_cast<std::int64_t>(N))) {
          dir = flipped;
        }
      }
      if (c.add_line(fam, Line<Rational>(anchor, embed(dir)))) ++st.lines_planar;
    }
  }
  for (const auto& y : lambda) {
    if (c.add_line(fam, Line<Rational>(embed(y), unit_vec<Rational>(f, n, m)))) ++st.lines_vertical;
  }

  st.k_nominal = static_cast<std::uint64_t>(
      boost::multiprecision::round(boost::multiprecision::pow(Real(N), to_real(alpha) * Real(m))));

  const LineIndex<Rational> index(c);
  std::vector<std::uint64_t> per_point, per_line(c.size(), 0);
  for (const auto& y : lambda) {
    const auto ids = index.lines_through(embed(y));
    per_point.push_back(ids.size());
    ++st.per_point_line_counts[ids.size()];
    for (auto id : ids) ++per_line[id];
  }
  st.k_median = detail::lower_median(per_point);
  st.per_line_points_min = per_line.empty() ? 0 : *std::min_element(per_line.begin(), per_line.end());
  st.per_line_points_median = detail::lower_median(per_line);
  return {std::move(c), st};
}

/// `lines` uniformly random lines of F_p^n (anchor uniform, direction uniform
/// nonzero), dealt round-robin into `families` families. Duplicates within a
/// family are redrawn.
template <FieldScalar S>
Configuration<S> random_config(const FieldSpec& f, std::size_t n, std::size_t lines, std::uint64_t seed,
                               std::size_t families = 1) {
  if (!f.is_prime()) throw PreconditionViolation("random configurations are drawn over prime fields");
  if (families != 1 && families != n) throw PreconditionViolation("families must be 1 or n");
  const std::uint64_t p = f.modulus();
  Configuration<S> c(f, n);
  for (std::size_t i = 0; i < families; ++i) c.add_family(families == 1 ? "L" : "L" + std::to_string(i + 1));
  Rng rng(seed);
  auto draw = [&] {
    Vec<S> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(S::from_int(f, static_cast<std::int64_t>(uniform_below(rng, p))));
    return v;
  };
  std::size_t attempts = 0;
  for (std::size_t j = 0; j < lines; ++j) {
    while (true) {
      if (++attempts > 100 * (lines + 1)) throw PreconditionViolation("field too small for that many distinct lines");
      auto anchor = draw();
      auto dir = draw();
      if (is_zero_vec<S>(dir)) continue;
      if (c.add_line(j % families, Line<S>(std::move(anchor), std::move(dir)))) break;
    }
  }
  return c;
}

}  // namespace jlab
