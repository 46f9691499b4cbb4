#include <gtest/gtest.h>

#include <random>

#include "jointslab/field.hpp"
#include "jointslab/linalg.hpp"
#include "jointslab/polynomial.hpp"
#include "support.hpp"

using namespace jlab;
using jlab::testing::first_order_coefficient;
using jlab::testing::random_poly;
using jlab::testing::random_vec;

namespace {

const FieldSpec F2 = FieldSpec::prime(2);
const FieldSpec F3 = FieldSpec::prime(3);
const FieldSpec F5 = FieldSpec::prime(5);
const FieldSpec Q = FieldSpec::rational();

MultiPoly<Rational> qpoly(std::size_t n, std::string_view s) { return MultiPoly<Rational>::parse(Q, n, s); }
MultiPoly<ModP> ppoly(const FieldSpec& f, std::size_t n, std::string_view s) { return MultiPoly<ModP>::parse(f, n, s); }

}  // namespace

TEST(FieldSpec, RejectsNonPrimes) {
  EXPECT_THROW(FieldSpec::prime(1), ValidationError);
  EXPECT_THROW(FieldSpec::prime(9), ValidationError);
  EXPECT_THROW(FieldSpec::prime(561), ValidationError);  // Carmichael
  EXPECT_NO_THROW(FieldSpec::prime(2));
  EXPECT_NO_THROW(FieldSpec::prime(1000000007));
  EXPECT_EQ(FieldSpec::prime(5), F5);
  EXPECT_FALSE(FieldSpec::prime(5) == FieldSpec::prime(7));
  EXPECT_FALSE(F5 == Q);
}

TEST(FieldSpec, PrimalityAgreesWithTrialDivision) {
  for (std::uint64_t n = 0; n < 3000; ++n) {
    bool trial = n >= 2;
    for (std::uint64_t d = 2; d * d <= n && trial; ++d) trial = n % d != 0;
    EXPECT_EQ(is_prime(n), trial) << n;
  }
}

TEST(Scalar, ModPArithmeticIsCanonical) {
  const auto a = ModP::from_int(F5, -1);
  EXPECT_EQ(a.residue(), 4u);
  EXPECT_EQ((a * a).residue(), 1u);
  EXPECT_EQ(a.inverse().residue(), 4u);
  EXPECT_EQ(ModP::parse(F5, "3/2").residue(), 4u);  // 3 * 2^-1 = 3 * 3
  EXPECT_THROW(ModP::from_int(F5, 0).inverse(), PreconditionViolation);
  for (std::int64_t x = 1; x < 5; ++x) {
    const auto s = ModP::from_int(F5, x);
    EXPECT_EQ((s * s.inverse()).residue(), 1u);
  }
}

TEST(Scalar, RationalArithmeticIsReduced) {
  const auto h = Rational::parse(Q, "2/4");
  EXPECT_EQ(h.str(), "1/2");
  EXPECT_EQ(Rational::parse(Q, "-6/3").str(), "-2");
  EXPECT_EQ((h + h).str(), "1");
  EXPECT_THROW(Rational::parse(Q, "1/0"), ValidationError);
  EXPECT_THROW(Rational::parse(Q, "abc"), ValidationError);
}

TEST(Matrix, RankExamples) {
  EXPECT_EQ(mat_rank(Matrix<ModP>::from_rows(F5, {make_vec<ModP>(F5, {1, 0, 0}), make_vec<ModP>(F5, {0, 1, 0}),
                                                   make_vec<ModP>(F5, {0, 0, 1})})),
            3u);
  EXPECT_EQ(mat_rank(Matrix<ModP>(F5, 3, 3)), 0u);
  EXPECT_EQ(mat_rank(Matrix<ModP>::from_rows(F5, {make_vec<ModP>(F5, {1, 0, 0}), make_vec<ModP>(F5, {0, 1, 0}),
                                                   make_vec<ModP>(F5, {1, 1, 0})})),
            2u);
}

TEST(Matrix, RankDependsOnCharacteristic) {
  // det = 5: singular mod 5, regular over Q
  EXPECT_EQ(rank_of(F5, std::vector<Vec<ModP>>{make_vec<ModP>(F5, {1, 2}), make_vec<ModP>(F5, {-1, 3})}), 1u);
  EXPECT_EQ(rank_of(Q, std::vector<Vec<Rational>>{make_vec<Rational>(Q, {1, 2}), make_vec<Rational>(Q, {-1, 3})}), 2u);
}

TEST(Matrix, NullspaceExamples) {
  auto v = mat_nullspace_vector(Matrix<Rational>::from_rows(Q, {make_vec<Rational>(Q, {1, -1})}));
  ASSERT_TRUE(v);
  EXPECT_EQ(vec_str<Rational>(*v), "(1, 1)");
  EXPECT_FALSE(mat_nullspace_vector(Matrix<Rational>::from_rows(Q, {make_vec<Rational>(Q, {1, 0}),
                                                                    make_vec<Rational>(Q, {0, 1})})));
  auto z = mat_nullspace_vector(Matrix<ModP>(F5, 1, 3));
  ASSERT_TRUE(z);
  EXPECT_EQ(vec_str<ModP>(*z), "(1, 0, 0)");
}

TEST(Matrix, NullspaceVectorIsAKernelElementAndDeterministic) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % 6;
    const FieldSpec f = trial % 2 ? F3 : Q;
    dispatch_field(f, [&](auto tag) {
      using S = typename decltype(tag)::type;
      std::vector<Vec<S>> rs;
      for (std::size_t r = 0; r < rows; ++r) rs.push_back(random_vec<S>(f, cols, rng, 2));
      const auto m = Matrix<S>::from_rows(f, rs);
      const auto v = mat_nullspace_vector(m);
      // kernel exists iff rank < cols
      EXPECT_EQ(v.has_value(), mat_rank(m) < cols);
      if (!v) return;
      EXPECT_FALSE(is_zero_vec<S>(*v));
      EXPECT_TRUE(is_zero_vec<S>(m * *v));
      EXPECT_EQ(*v, *mat_nullspace_vector(m));
    });
  }
}

TEST(Matrix, IncrementalBasisMatchesBatchRank) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    IncrementalBasis<ModP> basis(F3);
    std::vector<Vec<ModP>> seen;
    for (int k = 0; k < 5; ++k) {
      auto v = random_vec<ModP>(F3, 4, rng, 1);
      seen.push_back(v);
      basis.add(v);
      EXPECT_EQ(basis.rank(), rank_of(F3, seen));
    }
  }
}

TEST(Monomials, CountExamples) {
  EXPECT_EQ(monomial_count(2, 3), 10u);
  EXPECT_EQ(monomial_count(0, 5), 1u);
  EXPECT_EQ(monomial_count(1, 3), 4u);
}

TEST(Monomials, CountMatchesEnumeration) {
  for (unsigned n = 1; n <= 4; ++n) {
    for (unsigned d = 0; d <= 6; ++d) {
      // odometer over {0..d}^n, kept when the total is at most d
      std::size_t brute = 0;
      std::vector<unsigned> e(n, 0);
      while (true) {
        unsigned total = 0;
        for (auto a : e) total += a;
        if (total <= d) ++brute;
        std::size_t i = 0;
        while (i < n && ++e[i] > d) e[i++] = 0;
        if (i == n) break;
      }
      EXPECT_EQ(monomial_count(d, n), brute);
      EXPECT_EQ(monomials_up_to(d, n).size(), brute);
    }
  }
}

TEST(Monomials, AscendingGradedOrder) {
  const auto m = monomials_up_to(1, 3);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0], (Exponent{0, 0, 0}));
  EXPECT_EQ(m[1], (Exponent{0, 0, 1}));
  EXPECT_EQ(m[2], (Exponent{0, 1, 0}));
  EXPECT_EQ(m[3], (Exponent{1, 0, 0}));
}

TEST(Degree, ZeroPolynomialIsBelowEverything) {
  MultiPoly<Rational> zero(Q, 2);
  EXPECT_TRUE(zero.degree().is_minus_infinity());
  EXPECT_LT(zero.degree(), Degree(0));
  EXPECT_LT(zero.degree(), Degree(-1000));
  EXPECT_EQ(MultiPoly<Rational>::constant(Q, 2, Rational::from_int(Q, 3)).degree(), Degree(0));
}

TEST(Poly, EvalExamples) {
  EXPECT_EQ(ppoly(F5, 2, "1 * x1^2 + 1 * x2^1").eval(make_vec<ModP>(F5, {2, 1})).residue(), 0u);
  EXPECT_TRUE(MultiPoly<ModP>(F5, 3).eval(make_vec<ModP>(F5, {1, 2, 3})).is_zero());
  EXPECT_EQ(ppoly(F5, 3, "3").eval(make_vec<ModP>(F5, {1, 2, 3})).residue(), 3u);
}

TEST(Poly, RestrictExamples) {
  const auto origin = make_vec<ModP>(F5, {0, 0, 0});
  const auto e1 = make_vec<ModP>(F5, {1, 0, 0});
  EXPECT_EQ(ppoly(F5, 3, "1 * x1^1").restrict_to_line(origin, e1).str(), "1 * x1^1");
  EXPECT_TRUE(ppoly(F5, 3, "1 * x2^1").restrict_to_line(origin, e1).is_zero());
  EXPECT_EQ(ppoly(F5, 3, "1 * x1^1 x2^1").restrict_to_line(make_vec<ModP>(F5, {0, 1, 0}), e1).str(), "1 * x1^1");
}

TEST(Poly, RestrictionAgreesWithPointwiseEvaluation) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    const auto p = random_poly<Rational>(Q, n, rng);
    const auto a = random_vec<Rational>(Q, n, rng), d = random_vec<Rational>(Q, n, rng);
    const auto r = p.restrict_to_line(a, d);
    EXPECT_LE(r.degree(), p.degree());
    const int samples = p.is_zero() ? 1 : 2 * p.degree().value() + 1;
    for (int t = 0; t < samples; ++t) {
      const auto ts = Rational::from_int(Q, t - samples / 2);
      EXPECT_EQ(r.eval({ts}), p.eval(axpy(a, ts, d)));
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_poly<ModP>(F5, 3, rng, 6);
    const auto a = random_vec<ModP>(F5, 3, rng), d = random_vec<ModP>(F5, 3, rng);
    const auto r = p.restrict_to_line(a, d);
    for (int t = 0; t < 5; ++t) {
      const auto ts = ModP::from_int(F5, t);
      EXPECT_EQ(r.eval({ts}), p.eval(axpy(a, ts, d)));
    }
  }
}

TEST(Hasse, Examples) {
  EXPECT_TRUE(ppoly(F2, 1, "1 * x1^2").hasse_gradient()[0].is_zero());
  const auto g = qpoly(2, "1 * x1^2 x2^1").hasse_gradient();
  EXPECT_EQ(g[0], qpoly(2, "2 * x1^1 x2^1"));
  EXPECT_EQ(g[1], qpoly(2, "1 * x1^2"));
  for (const auto& c : qpoly(3, "7").hasse_gradient()) EXPECT_TRUE(c.is_zero());
}

TEST(Hasse, SecondOrderOverF2IsNotZero) {
  // x^2 has vanishing first derivative mod 2 but its second Hasse derivative is 1
  EXPECT_EQ(ppoly(F2, 1, "1 * x1^2").hasse_derivative({2}), ppoly(F2, 1, "1"));
}

TEST(Hasse, EqualsShiftCoefficient) {
  std::mt19937_64 rng(17);
  for (const FieldSpec& f : {Q, F2, F3, F5}) {
    for (int trial = 0; trial < 60; ++trial) {
      dispatch_field(f, [&](auto tag) {
        using S = typename decltype(tag)::type;
        const std::size_t n = 1 + rng() % 3;
        const auto p = random_poly<S>(f, n, rng, 4, 4);
        const auto g = p.hasse_gradient();
        for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(g[i], first_order_coefficient(p, i)) << p.str();
      });
    }
  }
}

TEST(Hasse, OverRationalsEqualsPartialDerivative) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    const auto p = random_poly<Rational>(Q, n, rng);
    const auto g = p.hasse_gradient();
    for (std::size_t i = 0; i < n; ++i) {
      MultiPoly<Rational> partial(Q, n);
      for (const auto& [e, c] : p.terms()) {
        if (e[i] == 0) continue;
        auto lowered = e;
        --lowered[i];
        partial.add_term(lowered, Rational::from_int(Q, e[i]) * c);
      }
      EXPECT_EQ(g[i], partial);
    }
  }
}

TEST(Hasse, VanishingGradientMeansCharacteristicPowers) {
  std::mt19937_64 rng(23);
  int zero_gradients = 0;
  for (const FieldSpec& f : {F2, F3, F5}) {
    for (int trial = 0; trial < 300; ++trial) {
      // half the draws use exponents in pZ so the zero-gradient case actually occurs
      const unsigned step = trial % 2 ? static_cast<unsigned>(f.modulus()) : 1;
      const auto p = random_poly<ModP>(f, 1 + rng() % 3, rng, 3, 4, step);
      if (p.degree() <= Degree(0)) continue;
      bool all_zero = true;
      for (const auto& c : p.hasse_gradient()) all_zero = all_zero && c.is_zero();
      if (!all_zero) continue;
      ++zero_gradients;
      for (const auto& [e, c] : p.terms()) {
        for (auto a : e) EXPECT_EQ(a % f.modulus(), 0u) << p.str();
      }
    }
  }
  EXPECT_GT(zero_gradients, 100);
}

TEST(Poly, CanonicalTextRoundTrips) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_poly<Rational>(Q, 1 + rng() % 4, rng);
    EXPECT_EQ(MultiPoly<Rational>::parse(Q, p.nvars(), p.str()), p);
    EXPECT_EQ(MultiPoly<Rational>::parse(Q, p.nvars(), p.str()).str(), p.str());
  }
  EXPECT_EQ(qpoly(3, "0").str(), "0");
  EXPECT_EQ(qpoly(3, "1 * x3^1 + 2 * x1^1").str(), "2 * x1^1 + 1 * x3^1");
  EXPECT_THROW(qpoly(3, "1 * y1^2"), ValidationError);
  EXPECT_THROW(qpoly(3, "1 * x4^2"), ValidationError);
}

TEST(Poly, ArithmeticRing) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_poly<ModP>(F5, 2, rng), b = random_poly<ModP>(F5, 2, rng);
    const auto x = random_vec<ModP>(F5, 2, rng);
    EXPECT_EQ((a * b).eval(x), a.eval(x) * b.eval(x));
    EXPECT_EQ((a + b).eval(x), a.eval(x) + b.eval(x));
    EXPECT_TRUE((a - a).is_zero());
  }
}
