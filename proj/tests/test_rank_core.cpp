#include <gtest/gtest.h>

#include <random>

#include "ncrank/oracle.hpp"
#include "ncrank/rank_core.hpp"

namespace ncrank {
namespace {

Rational q(long v) { return Rational(v); }

// Pencil from integer matrices: A0 and one matrix per variable.
Pencil make_pencil(std::vector<std::vector<long>> a0, std::vector<std::vector<std::vector<long>>> as) {
  auto conv = [](const std::vector<std::vector<long>>& m) {
    Matrix<Rational> out(m.size(), m.empty() ? 0 : m[0].size());
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m[i].size(); ++j) out(i, j) = q(m[i][j]);
    return out;
  };
  Pencil T;
  T.A0 = conv(a0);
  for (std::size_t v = 0; v < as.size(); ++v) {
    T.vars.push_back("x" + std::to_string(v + 1));
    T.A.push_back(conv(as[v]));
  }
  return T;
}

Pencil one_x1_x2_zero() { return make_pencil({{1, 0}, {0, 0}}, {{{0, 1}, {0, 0}}, {{0, 0}, {1, 0}}}); }
Pencil repeated_rows() { return make_pencil({{0, 0}, {0, 0}}, {{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}}); }
Pencil skew3() {
  return make_pencil({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}},
                     {{{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}},
                      {{0, 0, 1}, {0, 0, 0}, {-1, 0, 0}},
                      {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}}});
}

MatTuple<Rational> scalars(std::vector<long> v) {
  MatTuple<Rational> t;
  t.dim = 1;
  for (long x : v) t.mats.push_back(Matrix<Rational>(1, 1, {q(x)}));
  return t;
}

Pencil random_pencil(std::mt19937_64& rng, std::size_t s, std::size_t n, int lo, int hi) {
  std::uniform_int_distribution<int> c(lo, hi);
  Pencil T;
  T.A0 = Matrix<Rational>(s, s);
  for (auto& v : T.A0.data()) v = c(rng);
  for (std::size_t k = 0; k < n; ++k) {
    T.vars.push_back("x" + std::to_string(k + 1));
    Matrix<Rational> m(s, s);
    for (auto& v : m.data()) v = c(rng);
    T.A.push_back(m);
  }
  return T;
}

TEST(SchurAbp, Examples) {
  auto sd = schur_data(one_x1_x2_zero(), scalars({0, 0}), 1);
  auto f = schur_truncated_abp(sd, 0, 0);
  auto poly = abp_expand(f);
  ASSERT_EQ(poly.size(), 1u);
  EXPECT_EQ(poly.begin()->first, (Word{1, 0}));  // z2 z1
  EXPECT_EQ(poly.begin()->second, q(-1));

  auto g = schur_truncated_abp(schur_data(repeated_rows(), scalars({1, 0}), 1), 0, 0);
  EXPECT_TRUE(abp_expand(g).empty());
  EXPECT_TRUE(rs_zero_test(g));

  auto h = schur_truncated_abp(schur_data(make_pencil({{0}}, {{{1}}}), scalars({0}), 0), 0, 0);
  EXPECT_EQ(h.num_layers(), 1u);
  auto hp = abp_expand(h);
  ASSERT_EQ(hp.size(), 1u);
  EXPECT_EQ(hp.begin()->first, (Word{0}));
}

// U * T_d(Z + p) * V against the block form, coefficient by coefficient.
TEST(SchurAbp, BlocksReassemble) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> c(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    Pencil T = random_pencil(rng, 2 + trial % 2, 2, -1, 1);
    const std::size_t d = 1 + trial % 2;
    MatTuple<Rational> p = MatTuple<Rational>::zero(2, d);
    for (auto& m : p.mats)
      for (auto& v : m.data()) v = c(rng);
    const std::size_t rho = rank(pencil_eval(T, p));
    const std::size_t r = rho / d;
    auto sd = schur_data(T, p, r);
    auto Z = blowup_shift(T, d, p);
    const std::size_t m = sd.m;
    auto check = [&](const Matrix<Rational>& full, const Matrix<Rational>& L, const Matrix<Rational>& A,
                     const Matrix<Rational>& B, const Matrix<Rational>& C, bool constant) {
      Matrix<Rational> tl = constant ? Matrix<Rational>::identity(m) : Matrix<Rational>(m, m);
      tl -= L;
      Matrix<Rational> want = block_assemble<Rational>({{tl, A}, {B, C}});
      EXPECT_EQ(sd.U * full * sd.V, want) << trial;
    };
    check(Z.A0, sd.L.A0, sd.A.A0, sd.B.A0, sd.C.A0, true);
    for (std::size_t v = 0; v < Z.A.size(); ++v) check(Z.A[v], sd.L.A[v], sd.A.A[v], sd.B.A[v], sd.C.A[v], false);
  }
}

TEST(SchurAbp, TruncationFaithful) {
  std::mt19937_64 rng(11);
  int zeros = 0, nonzeros = 0;
  for (int trial = 0; trial < 12; ++trial) {
    Pencil T = random_pencil(rng, 3, 2, 0, 1);
    if (trial % 3 == 0) T.A[1] = T.A[0];  // lower ncrank, so that some entries vanish
    auto p = scalars({1, 0});
    const std::size_t rho = rank(pencil_eval(T, p));
    if (rho == 0) continue;
    const std::size_t r = std::min<std::size_t>(rho, 2);
    auto sd = schur_data(T, p, r);
    for (std::size_t i = 0; i < sd.C.rows(); ++i)
      for (std::size_t j = 0; j < sd.C.cols(); ++j) {
        bool zero = rs_zero_test(schur_truncated_abp(sd, i, j));
        ++(zero ? zeros : nonzeros);
        for (std::size_t extra = 1; extra <= 2; ++extra)
          EXPECT_EQ(zero, rs_zero_test(schur_truncated_abp(sd, i, j, sd.m + extra))) << trial;
      }
  }
  EXPECT_GT(zeros, 0);
  EXPECT_GT(nonzeros, 0);
}

Witness rational_witness(const MatTuple<Rational>& p, std::size_t r) {
  Witness w;
  w.r = r;
  w.dim = p.dim;
  w.tuple = detail::k_tuple(p);
  return w;
}

TEST(MaxRank, Examples) {
  EXPECT_TRUE(max_rank_test(repeated_rows(), rational_witness(scalars({1, 0}), 1)));
  EXPECT_FALSE(max_rank_test(one_x1_x2_zero(), rational_witness(scalars({0, 0}), 1)));
  Pencil id = make_pencil({{1, 0}, {0, 1}}, {});
  Witness full = rational_witness(scalars({}), 2);
  EXPECT_TRUE(max_rank_test(id, full));
}

TEST(RankIncrement, Examples) {
  Pencil T = one_x1_x2_zero();
  Witness w = rational_witness(scalars({0, 0}), 1);
  auto inc = rank_increment(T, w, 0, 0);
  EXPECT_EQ(inc.d_prime, 3u);
  EXPECT_EQ(inc.tuple.dim, 3u);
  EXPECT_GE(rank(pencil_eval(T, inc.tuple)), 4u);
  EXPECT_GE(inc.t0, 1);
  EXPECT_LE(inc.t0, 2 * 1 * 1 * 3 + 1);

  Pencil A = make_pencil({{1, 0}, {0, 0}}, {{{0, 0}, {0, 1}}});
  auto z = rank_increment(A, Witness::initial(1), 0, 0);
  EXPECT_EQ(z.d_prime, 1u);
  EXPECT_TRUE(z.tuple.mats[0].is_zero());
  EXPECT_EQ(rank(pencil_eval(A, z.tuple)), 1u);
}

TEST(RankIncrement, RaisesRankOnRandomPencils) {
  std::mt19937_64 rng(5);
  int raised = 0;
  for (int trial = 0; trial < 15; ++trial) {
    Pencil T = random_pencil(rng, 3, 2, -1, 1);
    Witness w = Witness::initial(2);
    for (int step = 0; step < 3; ++step) {
      MaxRankScan scan = scan_witness(T, w);
      if (scan.maximal) break;
      auto inc = rank_increment(T, w, scan.pick->i, scan.pick->j);
      EXPECT_GT(rank(pencil_eval(T, inc.tuple)), w.r * inc.tuple.dim);
      ++raised;
      w = reduce_witness(T, round_witness(T, inc.tuple, w.r));
    }
  }
  EXPECT_GT(raised, 10);
}

TEST(RoundWitness, IndexOneIsRational) {
  Pencil T = one_x1_x2_zero();
  auto out = round_witness(T, scalars({3, 5}), 1);
  EXPECT_EQ(out.dim, 1u);
  EXPECT_EQ(out.r, 2u);
  EXPECT_TRUE(out.is_rational());
  EXPECT_TRUE(verify_witness(T, out));
}

TEST(RoundWitness, DivisibleAndMonotone) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> c(-2, 2);
  int tested = 0;
  for (int trial = 0; trial < 12; ++trial) {
    Pencil T = random_pencil(rng, 2, 2, -1, 1);
    MatTuple<Rational> p = MatTuple<Rational>::zero(2, 2);
    for (auto& m : p.mats)
      for (auto& v : m.data()) v = c(rng);
    const std::size_t before = rank(pencil_eval(T, p));
    if (before == 0) continue;
    const std::size_t r = (before - 1) / 2;
    Witness out = round_witness(T, p, r);
    const std::size_t after = rank(pencil_eval(T, out.tuple));
    EXPECT_EQ(after % 2, 0u) << trial;
    EXPECT_GE(after, before) << trial;
    EXPECT_GE(after, (r + 1) * 2) << trial;
    EXPECT_EQ(d_rank(pencil_eval(T, out.tuple), 2).r * 2, after) << trial;
    ++tested;
  }
  EXPECT_GE(tested, 8);
}

TEST(ReduceWitness, NoOpAndSingleChop) {
  Pencil T = one_x1_x2_zero();
  Witness small = rational_witness(scalars({0, 0}), 1);
  Witness same = reduce_witness(T, small);
  EXPECT_EQ(same.dim, 1u);
  EXPECT_EQ(same.r, 1u);

  // dim 3 = r + 2 over the index-3 algebra: one chop-and-round cycle.
  Pencil S = skew3();
  MatTuple<Rational> p = MatTuple<Rational>::zero(3, 3);
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> c(-2, 2);
  for (auto& m : p.mats)
    for (auto& v : m.data()) v = c(rng);
  Witness w = round_witness(S, p, 0);
  w.r = 1;  // weaker claim, so that dim = r + 2
  Witness out = reduce_witness(S, w, ReducePolicy::Chop);
  EXPECT_EQ(out.dim, 2u);
  EXPECT_GE(out.r, 1u);
  EXPECT_TRUE(verify_witness(S, out));
  EXPECT_GE(rank(pencil_eval(S, out.tuple)), out.r * out.dim);
}

TEST(VerifyWitness, Examples) {
  Pencil T = one_x1_x2_zero();
  EXPECT_TRUE(verify_witness(T, Witness::initial(2)));
  Pencil id = make_pencil({{1, 0}, {0, 1}}, {});
  EXPECT_TRUE(verify_witness(id, rational_witness(scalars({}), 2)));
  Pencil x = make_pencil({{0}}, {{{1}}});
  EXPECT_FALSE(verify_witness(x, rational_witness(scalars({0}), 1)));
}

struct Case {
  Pencil T;
  std::size_t expected;
};

TEST(Ncrank, Examples) {
  std::vector<Case> cases = {{make_pencil({{0}}, {{{1}}}), 1},
                             {repeated_rows(), 1},
                             {one_x1_x2_zero(), 2},
                             {skew3(), 3},
                             {make_pencil({{0, 0}, {0, 0}}, {{{0, 0}, {0, 0}}}), 0}};
  for (auto policy : {ReducePolicy::Shrink, ReducePolicy::Chop}) {
    for (bool specialize : {true, false}) {
      for (const auto& c : cases) {
        NcrankOptions opt;
        opt.audit = true;
        opt.policy = policy;
        opt.specialize = specialize;
        auto res = ncrank(c.T, opt);
        EXPECT_EQ(res.r, c.expected);
        EXPECT_TRUE(verify_witness(c.T, res.witness));
        EXPECT_LE(res.witness.dim, res.r + 1);
        EXPECT_TRUE(verify_upper_certificate(c.T, res.witness, res.certificate));
        EXPECT_TRUE(res.audit.ok()) << (res.audit.failures.empty() ? "" : res.audit.failures[0]);
        EXPECT_LE(res.trace.size(), c.T.rows());
      }
    }
  }
}

TEST(SpecializeWitness, KeepsRankAndDropsYW) {
  Pencil T = skew3();
  NcrankOptions opt;
  opt.specialize = false;
  auto res = ncrank(T, opt);
  ASSERT_EQ(res.r, 3u);
  ASSERT_FALSE(res.witness.is_rational());
  Witness s = specialize_witness(T, res.witness);
  EXPECT_EQ(s.r, 3u);
  EXPECT_LE(s.dim, res.witness.dim);
  EXPECT_TRUE(verify_witness(T, s));
  for (const auto& m : s.tuple.mats)
    for (const auto& v : m.data()) EXPECT_TRUE(v.is_constant()) << to_string(v);
  // the skew pencil needs dimension 2
  EXPECT_EQ(s.dim, 2u);

  FieldScalar y = FieldScalar::y(2), w = FieldScalar::w(2);
  EXPECT_EQ(specialize_yw(y * y + w, Rational(2), Rational(3)), FieldScalar(7L));
  EXPECT_EQ(specialize_yw(FieldScalar(1L) / (y - FieldScalar(1L)), Rational(3), Rational(1)), FieldScalar(Rational(1, 2)));
  EXPECT_THROW(specialize_yw(FieldScalar(1L) / (y - FieldScalar(1L)), Rational(1), Rational(1)), DivisionByZero);
}

TEST(SpecializeWitness, ScalarWitnessWhenCommutativeRankSuffices) {
  Generated g = gen_family({.kind = "bipartite", .n = 5, .edges = "random", .seed = 20});
  auto res = ncrank(g.T);
  EXPECT_EQ(res.r, *g.rank);
  EXPECT_EQ(res.witness.dim, 1u);
  EXPECT_TRUE(verify_upper_certificate(g.T, res.witness, res.certificate));
}

TEST(Ncrank, MatchesBruteForceAndIsShiftInvariant) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> a(-3, 3);
  for (int trial = 0; trial < 12; ++trial) {
    Pencil T = random_pencil(rng, 2 + trial % 2, 1 + trial % 3, 0, 1);
    if (trial % 4 == 0) T.A0 = Matrix<Rational>(T.rows(), T.cols());
    auto res = ncrank(T);
    EXPECT_EQ(res.r, brute_lower_bound(T, 3, 30, 5).rank) << trial;
    Pencil shifted = T;
    for (std::size_t v = 0; v < T.num_vars(); ++v) shifted.A0 += T.A[v].scaled(Rational(a(rng), 1 + trial % 3));
    EXPECT_EQ(ncrank(shifted).r, res.r) << trial;
  }
}

TEST(Ncrank, BlowUpDoublesRank) {
  std::mt19937_64 rng(43);
  std::vector<Pencil> pencils = {skew3(), one_x1_x2_zero(), repeated_rows(), random_pencil(rng, 2, 2, -1, 1)};
  for (const auto& T : pencils) {
    Pencil T2 = blowup_shift(T, 2, MatTuple<Rational>::zero(T.num_vars(), 2));
    EXPECT_EQ(ncrank(T2).r, 2 * ncrank(T).r);
  }
}

TEST(Ncrank, ParallelScanGivesSameAnswer) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 4; ++trial) {
    Pencil T = random_pencil(rng, 3, 2, -1, 1);
    NcrankOptions one, four;
    four.jobs = 4;
    auto a = ncrank(T, one), b = ncrank(T, four);
    EXPECT_EQ(a.r, b.r);
    EXPECT_EQ(a.certificate.digest, b.certificate.digest);
  }
}

}  // namespace
}  // namespace ncrank
