#pragma once

// Nonzero polynomials of small degree vanishing on finite point sets or on
// finite line sets, obtained by dimension counting and one kernel vector.

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "jointslab/errors.hpp"
#include "jointslab/field.hpp"
#include "jointslab/line.hpp"
#include "jointslab/linalg.hpp"
#include "jointslab/polynomial.hpp"

namespace jlab {

/// Smallest d with C(d + n, n) > m: the evaluation map on m points then has a kernel.
inline unsigned min_interpolation_degree(std::uint64_t m, std::size_t n) {
  if (n < 1) throw PreconditionViolation("dimension must be positive");
  unsigned d = 0;
  while (monomial_count(d, n) <= m) ++d;
  return d;
}

/// Smallest d with C(d + n, n) > L (d + 1). A degree-d polynomial that vanishes
/// at d + 1 points of a line vanishes identically on it.
inline unsigned min_line_cover_degree(std::uint64_t line_count, std::size_t n) {
  if (n < 2) throw PreconditionViolation("line covering needs n >= 2");
  unsigned d = 0;
  while (monomial_count(d, n) <= line_count * (d + 1)) ++d;
  return d;
}

template <FieldScalar S>
struct VanishingCertificate {
  enum class Target { points, lines };

  MultiPoly<S> poly = MultiPoly<S>(FieldSpec::rational(), 0);
  Target target = Target::points;
  std::vector<Vec<S>> points;  // Target::points
  std::vector<Line<S>> lines;  // Target::lines, ids preserved
  int degree_bound = 0;
  std::size_t equations = 0;
  std::size_t unknowns = 0;
};

namespace detail {

/// Rows: points; columns: monomials of degree <= d in ascending graded-lex order.
template <FieldScalar S>
Matrix<S> evaluation_matrix(const FieldSpec& f, const std::vector<Vec<S>>& pts, const std::vector<Exponent>& monos,
                            std::size_t n, unsigned d) {
  Matrix<S> m(f, pts.size(), monos.size());
  for (std::size_t r = 0; r < pts.size(); ++r) {
    std::vector<Vec<S>> powers(n);
    for (std::size_t i = 0; i < n; ++i) {
      powers[i].push_back(S::from_int(f, 1));
      for (unsigned k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * pts[r][i]);
    }
    for (std::size_t c = 0; c < monos.size(); ++c) {
      S v = S::from_int(f, 1);
      for (std::size_t i = 0; i < n; ++i) {
        if (monos[c][i]) v *= powers[i][monos[c][i]];
      }
      m(r, c) = std::move(v);
    }
  }
  return m;
}

template <FieldScalar S>
MultiPoly<S> fit_kernel(const FieldSpec& f, std::size_t n, unsigned d, const std::vector<Vec<S>>& pts,
                        std::size_t& equations, std::size_t& unknowns) {
  const auto monos = monomials_up_to(d, n);
  const auto m = evaluation_matrix(f, pts, monos, n, d);
  equations = m.rows();
  unknowns = m.cols();
  auto v = mat_nullspace_vector(m);
  if (!v) throw LemmaViolation("evaluation system has trivial kernel despite dimension count");
  return MultiPoly<S>::from_coefficients(f, n, monos, *v);
}

}  // namespace detail

/// Polynomial of degree <= min_interpolation_degree(|pts|, n) vanishing on pts.
/// An empty point set yields the constant 1.
template <FieldScalar S>
VanishingCertificate<S> vanishing_poly_on_points(const FieldSpec& f, std::size_t n, const std::vector<Vec<S>>& pts) {
  VanishingCertificate<S> cert;
  cert.poly = MultiPoly<S>(f, n);
  cert.target = VanishingCertificate<S>::Target::points;
  cert.points = pts;
  const unsigned d = min_interpolation_degree(pts.size(), n);
  cert.degree_bound = static_cast<int>(d);
  cert.poly = detail::fit_kernel(f, n, d, pts, cert.equations, cert.unknowns);
  return cert;
}

/// Polynomial vanishing identically on every line: fit on the d + 1 sample
/// points t = 0, 1, ..., d of each line, then confirm each restriction is zero.
template <FieldScalar S>
VanishingCertificate<S> vanishing_poly_on_lines(const FieldSpec& f, std::size_t n, const std::vector<Line<S>>& lines) {
  VanishingCertificate<S> cert;
  cert.poly = MultiPoly<S>(f, n);
  cert.target = VanishingCertificate<S>::Target::lines;
  cert.lines = lines;
  const unsigned d = min_line_cover_degree(lines.size(), n);
  if (f.is_prime() && f.modulus() <= d) {
    throw FieldTooSmall("covering " + std::to_string(lines.size()) + " lines needs degree " + std::to_string(d) +
                        ", but " + f.name() + " has only " + std::to_string(f.modulus()) + " parameter values");
  }
  cert.degree_bound = static_cast<int>(d);
  std::vector<Vec<S>> samples;
  std::unordered_set<Vec<S>, VecHash<S>> seen;
  for (const auto& l : lines) {
    for (unsigned t = 0; t <= d; ++t) {
      auto x = l.point_at(S::from_int(f, t));
      if (seen.insert(x).second) samples.push_back(std::move(x));
    }
  }
  cert.poly = detail::fit_kernel(f, n, d, samples, cert.equations, cert.unknowns);
  for (const auto& l : lines) {
    if (!cert.poly.restrict_to_line(l.anchor(), l.direction()).is_zero()) {
      throw LemmaViolation("fitted polynomial does not vanish identically on line " + l.str());
    }
  }
  return cert;
}

template <FieldScalar S>
bool verify_vanishing(const VanishingCertificate<S>& cert) {
  if (cert.poly.is_zero()) return false;
  if (cert.poly.degree() > Degree(cert.degree_bound)) return false;
  if (cert.target == VanishingCertificate<S>::Target::points) {
    for (const auto& x : cert.points) {
      if (x.size() != cert.poly.nvars() || !cert.poly.eval(x).is_zero()) return false;
    }
    return true;
  }
  for (const auto& l : cert.lines) {
    if (l.dim() != cert.poly.nvars() || !cert.poly.restrict_to_line(l.anchor(), l.direction()).is_zero()) return false;
  }
  return true;
}

}  // namespace jlab
