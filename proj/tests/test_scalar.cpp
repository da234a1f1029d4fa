#include <gtest/gtest.h>

#include <random>

#include "ncrank/scalar_format.hpp"

namespace ncrank {
namespace {

CycloNumber zeta(int n, long k = 1) { return CycloNumber::zeta(n, k); }
CycloNumber rat(long p, long q = 1, int n = 1) { return CycloNumber(make_rational(p, q), n); }
FieldScalar Y(int n = 1) { return FieldScalar::y(n); }
FieldScalar W(int n = 1) { return FieldScalar::w(n); }

TEST(Cyclotomic, PolynomialsAndDegrees) {
  EXPECT_EQ(cyclotomic_polynomial(1).size(), 2u);
  EXPECT_EQ(cyclotomic_polynomial(12).size(), 5u);  // phi(12) = 4
  const auto& p6 = cyclotomic_polynomial(6);        // u^2 - u + 1
  EXPECT_EQ(p6[0], 1);
  EXPECT_EQ(p6[1], -1);
  EXPECT_EQ(p6[2], 1);
}

TEST(Cyclotomic, RootOfUnityRelation) {
  for (int n : {1, 2, 3, 4, 5, 6, 8, 9, 12}) {
    CycloNumber z = zeta(n);
    CycloNumber p = rat(1, 1, n);
    for (int i = 0; i < n; ++i) p = p * z;
    EXPECT_TRUE(p.is_one()) << n;
  }
}

TEST(Cyclotomic, InverseExamples) {
  EXPECT_EQ(cyclo_inverse(zeta(4)), -zeta(4));
  EXPECT_EQ(cyclo_inverse(rat(1, 1, 3) + zeta(3)), -zeta(3));
  EXPECT_EQ(cyclo_inverse(rat(5, 1, 7)), rat(1, 5, 7));
  EXPECT_THROW(cyclo_inverse(rat(0, 1, 5)), DivisionByZero);
}

TEST(Cyclotomic, InverseProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int n : {3, 5, 7, 8, 12}) {
    for (int trial = 0; trial < 10; ++trial) {
      detail::QPoly c(static_cast<std::size_t>(phi_of(n)));
      for (auto& v : c) v = coef(rng);
      CycloNumber a = CycloNumber::from_coeffs(n, c);
      if (a.is_zero()) continue;
      EXPECT_TRUE((a * cyclo_inverse(a)).is_one());
    }
  }
}

TEST(Cyclotomic, EmbedExamples) {
  EXPECT_EQ(cyclo_embed(rat(-1, 1, 2), 4).coeffs(), zeta(4, 2).coeffs());
  EXPECT_EQ(cyclo_embed(rat(3), 6).coeffs(), rat(3, 1, 6).coeffs());
  CycloNumber z3in6 = cyclo_embed(zeta(3), 6);
  EXPECT_EQ(z3in6.coeffs(), zeta(6, 2).coeffs());
  // z6^2 is a primitive cube root: its cube is 1 and it is not 1 itself.
  EXPECT_TRUE((z3in6 * z3in6 * z3in6).is_one());
  EXPECT_FALSE(z3in6.is_one());
  EXPECT_THROW(cyclo_embed(zeta(4), 6), std::invalid_argument);
}

TEST(Cyclotomic, EmbedProjectRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (int m : {4, 6, 8, 9, 12}) {
    for (int n = 1; n <= m; ++n) {
      if (m % n != 0) continue;
      detail::QPoly c(static_cast<std::size_t>(phi_of(n)));
      for (auto& v : c) v = make_rational(coef(rng), 1 + (coef(rng) + 4) % 3);
      CycloNumber a = CycloNumber::from_coeffs(n, c);
      auto back = cyclo_project(cyclo_embed(a, m), n);
      ASSERT_TRUE(back.has_value());
      EXPECT_EQ(back->coeffs(), a.coeffs());
    }
  }
  EXPECT_FALSE(cyclo_project(zeta(4), 2).has_value());
}

TEST(BiPoly, GcdExamples) {
  BiPoly y = BiPoly::y(), w = BiPoly::w();
  EXPECT_EQ(bipoly_gcd(y * y - w * w, y - w), y - w);
  EXPECT_TRUE(bipoly_gcd(y, w).is_one());
  BiPoly a = (y * y * w).scaled(rat(2));
  BiPoly b = (y * w * w).scaled(rat(4));
  EXPECT_EQ(bipoly_gcd(a, b), y * w);
  EXPECT_TRUE(bipoly_gcd(BiPoly(), BiPoly()).is_zero());
}

TEST(BiPoly, GcdOfProductsWithCommonFactor) {
  BiPoly y = BiPoly::y(3), w = BiPoly::w(3), u = BiPoly(zeta(3));
  BiPoly common = y * y + u * w + BiPoly(rat(1, 1, 3));
  BiPoly f = common * (y - w * w);
  BiPoly g = common * (y * w + u);
  EXPECT_EQ(bipoly_gcd(f, g), make_monic(common));
  EXPECT_EQ(exact_divide(f, common), y - w * w);
  EXPECT_THROW(exact_divide(y + w, y - w), std::domain_error);
}

TEST(FieldScalar, NormalizeExamples) {
  BiPoly y = BiPoly::y(), w = BiPoly::w();
  BiPoly one(rat(1));
  EXPECT_EQ(scalar_normalize(y * y - one, y - one), FieldScalar(y + one));
  EXPECT_TRUE(scalar_normalize(BiPoly(), w).is_zero());
  FieldScalar h = scalar_normalize(y.scaled(rat(2)), BiPoly(rat(4)));
  EXPECT_EQ(h.num(), y.scaled(rat(1, 2)));
  EXPECT_TRUE(h.den().is_one());
  EXPECT_THROW(scalar_normalize(y, BiPoly()), DivisionByZero);
}

TEST(FieldScalar, GaloisShiftExamples) {
  EXPECT_EQ(galois_shift(Y() * Y() + Y(), 1, 2), Y() * Y() - Y());
  EXPECT_EQ(galois_shift(W(), 1, 3), W());
  EXPECT_EQ(galois_shift(W(5), 4, 5), W(5));
  FieldScalar y3 = Y(3) * Y(3) * Y(3);
  EXPECT_EQ(galois_shift(y3, 1, 3), y3);
  EXPECT_EQ(galois_shift(y3 + W(3), 2, 3), y3 + W(3));
}

// Small random element of Q(zeta_n)(y, w).
FieldScalar random_scalar(std::mt19937_64& rng, int n, bool allow_zero = true) {
  std::uniform_int_distribution<int> coef(-2, 2);
  std::uniform_int_distribution<int> deg(0, 2);
  auto poly = [&](int terms) {
    std::vector<BiTerm> ts;
    for (int i = 0; i < terms; ++i) {
      detail::QPoly c(static_cast<std::size_t>(phi_of(n)));
      for (auto& v : c) v = coef(rng);
      ts.push_back({deg(rng), deg(rng) % 2, CycloNumber::from_coeffs(n, c)});
    }
    return BiPoly::from_terms(n, ts);
  };
  while (true) {
    BiPoly num = poly(1 + deg(rng));
    BiPoly den = poly(1 + deg(rng) % 2);
    if (den.is_zero()) continue;
    if (!allow_zero && num.is_zero()) continue;
    return scalar_normalize(num, den);
  }
}

TEST(FieldScalar, FieldAxiomsOnSamples) {
  std::mt19937_64 rng(2024);
  for (int n : {1, 3, 4}) {
    for (int trial = 0; trial < 12; ++trial) {
      FieldScalar a = random_scalar(rng, n), b = random_scalar(rng, n), c = random_scalar(rng, n);
      EXPECT_EQ((a + b) + c, a + (b + c));
      EXPECT_EQ(a * (b + c), a * b + a * c);
      EXPECT_EQ(a * b, b * a);
      EXPECT_TRUE((a - a).is_zero());
      if (!a.is_zero()) {
        EXPECT_EQ(a * a.inverse(), FieldScalar(1L));
      }
      if (!b.is_zero()) {
        EXPECT_EQ((a / b) * b, a);
      }
    }
  }
}

TEST(FieldScalar, GaloisShiftIsAutomorphismOfOrderEll) {
  std::mt19937_64 rng(77);
  for (int ell : {2, 3, 4, 5}) {
    for (int trial = 0; trial < 6; ++trial) {
      FieldScalar a = random_scalar(rng, ell), b = random_scalar(rng, ell);
      FieldScalar s = a;
      for (int k = 0; k < ell; ++k) s = galois_shift(s, 1, ell);
      EXPECT_EQ(s, a);
      EXPECT_EQ(galois_shift(a, ell, ell), a);
      EXPECT_EQ(galois_shift(a * b, 1, ell), galois_shift(a, 1, ell) * galois_shift(b, 1, ell));
      EXPECT_EQ(galois_shift(a + b, 1, ell), galois_shift(a, 1, ell) + galois_shift(b, 1, ell));
    }
  }
}

TEST(FieldScalar, NormalizationIsIdempotentAndScaleInvariant) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 15; ++trial) {
    FieldScalar a = random_scalar(rng, 3);
    FieldScalar again = scalar_normalize(a.num(), a.den());
    EXPECT_EQ(again.num(), a.num());
    EXPECT_EQ(again.den(), a.den());
    FieldScalar c = random_scalar(rng, 3, false);
    if (!c.is_polynomial() || c.num().is_zero()) continue;
    EXPECT_EQ(scalar_normalize(a.num() * c.num(), a.den() * c.num()), a);
  }
}

TEST(ScalarFormat, Examples) {
  EXPECT_EQ(to_string(Rational(-3, 4)), "-3/4");
  EXPECT_EQ(to_string(rat(1, 2, 5) + zeta(5, 2).scaled(Rational(3))), "1/2 + 3*u^2");
  EXPECT_EQ(parse_scalar("(y^2-1)/(y-1)"), Y() + FieldScalar(1L));
  EXPECT_EQ(parse_scalar("1/2*y"), Y() * FieldScalar(make_rational(1, 2)));
  EXPECT_EQ(parse_scalar("u^3", 3), FieldScalar(1L).embedded(3));
  EXPECT_THROW(parse_scalar("1/0"), ParseError);
  EXPECT_THROW(parse_scalar("y +"), ParseError);
  EXPECT_THROW(parse_scalar("x"), ParseError);
}

TEST(ScalarFormat, PrintParseRoundTrip) {
  std::mt19937_64 rng(31);
  for (int n : {1, 2, 3, 5, 6}) {
    for (int trial = 0; trial < 15; ++trial) {
      FieldScalar a = random_scalar(rng, n);
      EXPECT_EQ(parse_scalar(to_string(a), n), a) << to_string(a);
    }
  }
}

}  // namespace
}  // namespace ncrank
