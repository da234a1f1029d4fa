#include <gtest/gtest.h>

#include <random>

#include "ncrank/linalg.hpp"
#include "ncrank/modular.hpp"
#include "ncrank/scalar_format.hpp"

namespace ncrank {
namespace {

using KMat = Matrix<FieldScalar>;
using QMat = Matrix<Rational>;

FieldScalar Y() { return FieldScalar::y(); }
FieldScalar W() { return FieldScalar::w(); }
FieldScalar k(long v) { return FieldScalar(v); }

KMat diag_identity(std::size_t n, std::size_t rho, std::size_t m) {
  KMat d(n, m);
  for (std::size_t i = 0; i < rho; ++i) d(i, i) = k(1);
  return d;
}

TEST(Rank, Examples) {
  EXPECT_EQ(rank(KMat{{k(1), k(0)}, {k(0), k(0)}}), 1u);
  EXPECT_EQ(rank(KMat{{k(0), k(1)}, {W(), k(0)}}), 2u);
  EXPECT_EQ(rank(KMat{{Y(), k(1)}, {Y() * Y(), Y()}}), 1u);
  EXPECT_EQ(rank(KMat(3, 2)), 0u);
}

TEST(PivotForm, Examples) {
  auto z = pivot_form(KMat(2, 2));
  EXPECT_EQ(z.rho, 0u);
  EXPECT_EQ(z.U, KMat::identity(2));
  EXPECT_EQ(z.V, KMat::identity(2));

  auto id = pivot_form(KMat::identity(3));
  EXPECT_EQ(id.rho, 3u);
  EXPECT_EQ(id.U, KMat::identity(3));
  EXPECT_EQ(id.V, KMat::identity(3));

  KMat m{{k(0), k(2)}, {k(0), k(0)}};
  auto pf = pivot_form(m);
  EXPECT_EQ(pf.rho, 1u);
  EXPECT_EQ(pf.U * m * pf.V, diag_identity(2, 1, 2));
}

KMat random_kmat(std::mt19937_64& rng, std::size_t r, std::size_t c, int n) {
  std::uniform_int_distribution<int> coef(-2, 2);
  std::uniform_int_distribution<int> pick(0, 5);
  KMat m(r, c);
  FieldScalar u(CycloNumber::zeta(n, 1));
  for (auto i = 0u; i < r; ++i)
    for (auto j = 0u; j < c; ++j) {
      switch (pick(rng)) {
        case 0:
        case 1:
          break;
        case 2:
          m(i, j) = k(coef(rng));
          break;
        case 3:
          m(i, j) = Y() * k(coef(rng)) + u;
          break;
        case 4:
          m(i, j) = (W() + k(coef(rng))) / (Y() + k(1));
          break;
        default:
          m(i, j) = u * Y() - W() * k(coef(rng));
      }
    }
  return m;
}

TEST(PivotForm, ReconstructsOnRandomMatrices) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t r = 1 + trial % 4, c = 1 + (trial / 4) % 4;
    KMat m = random_kmat(rng, r, c, 3);
    if (trial % 3 == 0 && r > 1) {
      for (std::size_t j = 0; j < c; ++j) m(r - 1, j) = m(0, j) * Y();
    }
    auto pf = pivot_form(m);
    EXPECT_EQ(pf.U * m * pf.V, diag_identity(r, pf.rho, c));
    EXPECT_EQ(pf.rho, rank(m));
    EXPECT_EQ(rank(pf.U), r);
    EXPECT_EQ(rank(pf.V), c);
    EXPECT_EQ(rank(pf.U * m * pf.V), rank(m));
  }
}

TEST(Rank, AgreesWithFractionFreeElimination) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t r = 1 + trial % 4, c = 1 + (trial / 3) % 4;
    KMat m = random_kmat(rng, r, c, trial % 2 ? 4 : 1);
    if (trial % 2 == 0 && c > 1) {
      for (std::size_t i = 0; i < r; ++i) m(i, c - 1) = m(i, 0) * (W() + k(1));
    }
    EXPECT_EQ(rank_profile(m).rank, bareiss_rank(m)) << "trial " << trial;
  }
}

TEST(Rank, ModularProbeIsALowerBound) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 15; ++trial) {
    KMat m = random_kmat(rng, 3, 4, 3);
    auto pr = ModProbe::get(3).rank_of(m);
    ASSERT_TRUE(pr.has_value());
    EXPECT_LE(*pr, rank(m));
  }
}

TEST(Solve, Examples) {
  auto x = solve(KMat::identity(2), {Y(), W()});
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ((*x)[0], Y());
  EXPECT_EQ((*x)[1], W());

  EXPECT_FALSE(solve(KMat{{k(1), k(1)}, {k(1), k(1)}}, {k(1), k(0)}).has_value());

  auto z = solve(KMat{{k(1), k(1)}, {k(0), k(1)}}, {k(3), k(2)});
  ASSERT_TRUE(z.has_value());
  EXPECT_EQ((*z)[0], k(1));
  EXPECT_EQ((*z)[1], k(2));
}

TEST(Solve, SolutionsVerifyBySubstitution) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 15; ++trial) {
    KMat a = random_kmat(rng, 3, 3 + trial % 2, 1);
    KMat x0 = random_kmat(rng, a.cols(), 1, 1);
    KMat b = a * x0;
    std::vector<FieldScalar> rhs(b.data());
    auto x = solve(a, rhs);
    ASSERT_TRUE(x.has_value());
    KMat xv(a.cols(), 1, *x);
    EXPECT_EQ(a * xv, b);
  }
}

TEST(Inverse, RoundTrip) {
  KMat m{{Y(), k(1)}, {W(), k(2)}};
  auto inv = inverse(m);
  ASSERT_TRUE(inv.has_value());
  EXPECT_EQ(m * *inv, KMat::identity(2));
  EXPECT_FALSE(inverse(KMat{{Y(), k(1)}, {Y() * Y(), Y()}}).has_value());
  EXPECT_EQ(determinant(m), k(2) * Y() - W());
}

TEST(Kron, Examples) {
  QMat a{{Rational(0), Rational(1)}, {Rational(0), Rational(0)}};
  QMat t = tensor_with_identity(a, 2);
  QMat expect(4, 4);
  expect(0, 2) = 1;
  expect(1, 3) = 1;
  EXPECT_EQ(t, expect);
  EXPECT_EQ(tensor_with_identity(a, 1), a);
  QMat e11{{Rational(1), Rational(0)}, {Rational(0), Rational(0)}};
  EXPECT_EQ(rank(tensor_with_identity(e11, 3)), 3u);
  EXPECT_EQ(kron(a, QMat::identity(2)), t);
  EXPECT_THROW(a * QMat(3, 1), ShapeError);
}

TEST(Kron, TensorIsMultiplicativeAndScalesRank) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coef(-1, 1);
  for (std::size_t r = 1; r <= 3; ++r)
    for (std::size_t c = 1; c <= 3; ++c)
      for (int trial = 0; trial < 4; ++trial) {
        QMat a(r, c), b(c, 2);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) a(i, j) = coef(rng);
        for (std::size_t i = 0; i < c; ++i)
          for (std::size_t j = 0; j < 2; ++j) b(i, j) = coef(rng);
        for (std::size_t d = 1; d <= 3; ++d) {
          EXPECT_EQ(rank(tensor_with_identity(a, d)), d * rank(a));
          EXPECT_EQ(tensor_with_identity(a, d) * tensor_with_identity(b, d), tensor_with_identity(QMat(a * b), d));
        }
      }
}

TEST(BlockAssemble, GridShapes) {
  QMat i2 = QMat::identity(2);
  QMat z21(2, 1), z12(1, 2), one{{Rational(1)}};
  QMat full = block_assemble<Rational>({{i2, z21}, {z12, one}});
  EXPECT_EQ(full, QMat::identity(3));
  EXPECT_THROW(block_assemble<Rational>({{i2, z12}}), ShapeError);
}

}  // namespace
}  // namespace ncrank
