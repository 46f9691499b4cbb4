#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "jointslab/constructions.hpp"
#include "jointslab/vanishing.hpp"
#include "support.hpp"

using namespace jlab;
using jlab::testing::random_vec;

namespace {

const FieldSpec F2 = FieldSpec::prime(2);
const FieldSpec F3 = FieldSpec::prime(3);
const FieldSpec F11 = FieldSpec::prime(11);
const FieldSpec Q = FieldSpec::rational();

template <FieldScalar S>
Vec<S> v(const FieldSpec& f, std::initializer_list<std::int64_t> xs) {
  return make_vec<S>(f, xs);
}

std::uint64_t factorial(unsigned n) { return n <= 1 ? 1 : n * factorial(n - 1); }

/// Smallest r with r^n >= x.
std::uint64_t integer_root_ceil(std::uint64_t x, unsigned n) {
  auto pw = [&](std::uint64_t r) {
    unsigned __int128 p = 1;
    for (unsigned i = 0; i < n; ++i) p *= r;
    return p;
  };
  std::uint64_t r = static_cast<std::uint64_t>(std::pow(static_cast<double>(x), 1.0 / n));
  while (r > 0 && pw(r - 1) >= x) --r;
  while (pw(r) < x) ++r;
  return r;
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(Degrees, InterpolationExamples) {
  EXPECT_EQ(min_interpolation_degree(3, 3), 1u);
  EXPECT_EQ(min_interpolation_degree(4, 3), 2u);
  EXPECT_EQ(min_interpolation_degree(1, 2), 1u);
  EXPECT_EQ(min_interpolation_degree(8, 3), 2u);
  // C(6,3) = 20 <= 27 < 35 = C(7,3)
  EXPECT_EQ(min_interpolation_degree(27, 3), 4u);
  EXPECT_EQ(min_interpolation_degree(0, 3), 0u);
}

TEST(Degrees, LineCoverExamples) {
  EXPECT_EQ(min_line_cover_degree(2, 3), 2u);
  EXPECT_EQ(min_line_cover_degree(1, 2), 1u);
  // d = 6: 84 > 84 fails; d = 7: 120 > 96
  EXPECT_EQ(min_line_cover_degree(12, 3), 7u);
  EXPECT_EQ(min_line_cover_degree(0, 3), 0u);
}

TEST(Degrees, InterpolationDegreeGrowsLikeTheNthRoot) {
  for (unsigned n = 1; n <= 6; ++n) {
    unsigned d = 0;
    const std::uint64_t nf = factorial(n);
    for (std::uint64_t m = 1; m <= 1000000; ++m) {
      while (monomial_count(d, n) <= m) ++d;  // d is monotone in m
      ASSERT_LE(d, integer_root_ceil(nf * m, n) + n) << "m=" << m << " n=" << n;
    }
    EXPECT_EQ(d, min_interpolation_degree(1000000, n));
  }
}

TEST(Degrees, LineCoverDegreeExponent) {
  for (unsigned n = 2; n <= 4; ++n) {
    std::vector<double> xs, ys;
    double c_n = 0;
    unsigned d = 0;
    for (std::uint64_t L = 1; L <= 100000; ++L) {
      while (monomial_count(d, n) <= L * (d + 1)) ++d;  // monotone in L
      c_n = std::max(c_n, d / std::pow(static_cast<double>(L), 1.0 / (n - 1)));
    }
    EXPECT_EQ(d, min_line_cover_degree(100000, n));
    // slope fitted on log-spaced samples of [10^3, 10^5]; below that the lower-order terms dominate
    std::set<std::uint64_t> samples;
    for (int k = 60; k <= 100; ++k) samples.insert(static_cast<std::uint64_t>(std::llround(std::pow(10.0, k / 20.0))));
    for (auto L : samples) {
      xs.push_back(std::log(static_cast<double>(L)));
      ys.push_back(std::log(static_cast<double>(min_line_cover_degree(L, n))));
    }
    const double s = slope(xs, ys);
    EXPECT_NEAR(s, 1.0 / (n - 1), 0.05) << "n=" << n;
    std::printf("line cover degree: n=%u measured c(n)=%.4f slope=%.4f\n", n, c_n, s);
  }
}

TEST(PointVanishing, OriginGivesLastVariable) {
  // columns 1, x3, x2, x1: the first free column is x3
  const auto cert = vanishing_poly_on_points<Rational>(Q, 3, {v<Rational>(Q, {0, 0, 0})});
  EXPECT_EQ(cert.poly.str(), "1 * x3^1");
  EXPECT_EQ(cert.degree_bound, 1);
  EXPECT_EQ(cert.equations, 1u);
  EXPECT_EQ(cert.unknowns, 4u);
  EXPECT_TRUE(verify_vanishing(cert));
}

TEST(PointVanishing, AllOfF2Squared) {
  std::vector<Vec<ModP>> pts;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) pts.push_back(v<ModP>(F2, {a, b}));
  const auto cert = vanishing_poly_on_points(F2, 2, pts);
  EXPECT_EQ(cert.degree_bound, 2);
  EXPECT_EQ(cert.poly.str(), "1 * x2^2 + 1 * x2^1");  // y^2 + y, zero on F_2
  EXPECT_TRUE(verify_vanishing(cert));
}

TEST(PointVanishing, ConicThroughThreePoints) {
  const auto cert = vanishing_poly_on_points<Rational>(
      Q, 2, {v<Rational>(Q, {0, 0}), v<Rational>(Q, {1, 0}), v<Rational>(Q, {0, 1})});
  EXPECT_EQ(cert.degree_bound, 2);
  EXPECT_EQ(cert.poly.str(), "1 * x2^2 + -1 * x2^1");
  EXPECT_TRUE(verify_vanishing(cert));
}

TEST(PointVanishing, RandomSetsVerifyAndAreDeterministic) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 60; ++trial) {
    const FieldSpec f = trial % 2 ? F11 : Q;
    dispatch_field(f, [&](auto tag) {
      using S = typename decltype(tag)::type;
      std::vector<Vec<S>> pts;
      std::set<std::string> seen;
      const std::size_t m = 1 + rng() % 25;
      while (pts.size() < m) {
        auto x = random_vec<S>(f, 3, rng, 5);
        if (seen.insert(vec_str<S>(x)).second) pts.push_back(x);
      }
      const auto a = vanishing_poly_on_points(f, 3, pts);
      const auto b = vanishing_poly_on_points(f, 3, pts);
      EXPECT_TRUE(verify_vanishing(a));
      EXPECT_EQ(a.poly.str(), b.poly.str());
      EXPECT_LE(a.poly.degree(), Degree(static_cast<int>(min_interpolation_degree(m, 3))));
      for (const auto& x : pts) EXPECT_TRUE(a.poly.eval(x).is_zero());
    });
  }
}

TEST(LineVanishing, Examples) {
  const Line<Rational> x_axis(v<Rational>(Q, {0, 0, 0}), v<Rational>(Q, {1, 0, 0}));
  const auto one = vanishing_poly_on_lines<Rational>(Q, 3, {x_axis});
  EXPECT_LE(one.poly.degree(), Degree(1));
  EXPECT_TRUE(one.poly.restrict_to_line(x_axis.anchor(), x_axis.direction()).is_zero());

  const Line<Rational> y_axis(v<Rational>(Q, {0, 0, 0}), v<Rational>(Q, {0, 1, 0}));
  const auto two = vanishing_poly_on_lines<Rational>(Q, 3, {x_axis, y_axis});
  EXPECT_LE(two.poly.degree(), Degree(2));
  EXPECT_TRUE(verify_vanishing(two));

  const auto grid = grid_config<Rational>(2, 3, Q);
  const auto cert = vanishing_poly_on_lines(Q, 3, grid.lines());
  EXPECT_LE(cert.poly.degree(), Degree(static_cast<int>(min_line_cover_degree(12, 3))));
  EXPECT_TRUE(verify_vanishing(cert));
  for (const auto& l : grid.lines()) EXPECT_TRUE(cert.poly.restrict_to_line(l.anchor(), l.direction()).is_zero());
}

TEST(LineVanishing, RefusesSmallFields) {
  // two lines need degree 2, so F_2 cannot supply 3 distinct parameters
  const Line<ModP> a(v<ModP>(F2, {0, 0, 0}), v<ModP>(F2, {1, 0, 0}));
  const Line<ModP> b(v<ModP>(F2, {0, 0, 0}), v<ModP>(F2, {0, 1, 0}));
  EXPECT_THROW(vanishing_poly_on_lines<ModP>(F2, 3, {a, b}), FieldTooSmall);
  EXPECT_NO_THROW(vanishing_poly_on_lines<ModP>(F3, 3, {Line<ModP>(v<ModP>(F3, {0, 0, 0}), v<ModP>(F3, {1, 0, 0})),
                                                        Line<ModP>(v<ModP>(F3, {0, 0, 0}), v<ModP>(F3, {0, 1, 0}))}));
}

TEST(LineVanishing, RandomLinesVanishIdentically) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto c = random_config<ModP>(F11, 3, 1 + seed % 12, seed);
    const auto cert = vanishing_poly_on_lines(F11, 3, c.lines());
    EXPECT_TRUE(verify_vanishing(cert));
    // over F_11 the line has 11 points: check every one, independent of the restriction routine
    for (const auto& l : c.lines()) {
      for (std::int64_t t = 0; t < 11; ++t) EXPECT_TRUE(cert.poly.eval(l.point_at(ModP::from_int(F11, t))).is_zero());
    }
  }
}

TEST(Verify, RejectsTampering) {
  VanishingCertificate<Rational> bad;
  bad.poly = MultiPoly<Rational>::parse(Q, 3, "1 * x1^1");
  bad.points = {v<Rational>(Q, {1, 0, 0})};
  bad.degree_bound = 1;
  EXPECT_FALSE(verify_vanishing(bad));

  auto cert = vanishing_poly_on_points<Rational>(Q, 3, {v<Rational>(Q, {1, 2, 3}), v<Rational>(Q, {0, 1, 0}),
                                                        v<Rational>(Q, {2, 2, 2}), v<Rational>(Q, {5, 0, 1})});
  ASSERT_TRUE(verify_vanishing(cert));
  ASSERT_EQ(cert.poly.degree(), Degree(2));
  cert.degree_bound = 1;
  EXPECT_FALSE(verify_vanishing(cert));

  auto zero = cert;
  zero.degree_bound = 2;
  zero.poly = MultiPoly<Rational>(Q, 3);
  EXPECT_FALSE(verify_vanishing(zero));
}
