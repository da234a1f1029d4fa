#pragma once

// The cyclic division algebra of index ell over F = Q(zeta_ell)(y^ell, w),
// represented by ell x ell matrices over K = Q(zeta_ell)(y, w):
//   X    = cir(1, ..., 1, w)            (X^ell = w)
//   M(b) = diag(b, s(b), ..., s^{ell-1}(b)) with s: y -> zeta_ell * y
//   C_ij = M(y^{j-1}) * X^{i-1}         (1 <= i, j <= ell)

#include <optional>
#include <stdexcept>
#include <vector>

#include "ncrank/linalg.hpp"

namespace ncrank {

using KMatrix = Matrix<FieldScalar>;

struct DivAlgebra {
  int ell = 1;
  int cyclo_index() const { return ell; }
  CycloNumber omega() const { return CycloNumber::zeta(ell, 1); }
};

inline KMatrix rep_x(int ell) {
  if (ell < 1) throw std::invalid_argument("rep_x: ell must be positive");
  const auto n = static_cast<std::size_t>(ell);
  KMatrix x(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) x(i, i + 1) = FieldScalar(1L).embedded(ell);
  x(n - 1, 0) = FieldScalar::w(ell);
  return x;
}

inline KMatrix rep_diag(const FieldScalar& b, int ell) {
  if (ell < 1) throw std::invalid_argument("rep_diag: ell must be positive");
  const auto n = static_cast<std::size_t>(ell);
  KMatrix m(n, n);
  for (std::size_t t = 0; t < n; ++t) m(t, t) = galois_shift(b, static_cast<long>(t), ell);
  return m;
}

/// C_ij with 1-based (i, j). Entry (t, t+i-1 mod ell) is
/// zeta^{t(j-1)} y^{j-1}, times w when the column index wraps.
inline KMatrix basis_matrix(int i, int j, int ell) {
  if (i < 1 || j < 1 || i > ell || j > ell) throw std::invalid_argument("basis_matrix: index out of range");
  const auto n = static_cast<std::size_t>(ell);
  const auto k = static_cast<std::size_t>(i - 1);
  KMatrix m(n, n);
  FieldScalar yj(BiPoly::monomial(CycloNumber(Rational(1), ell), j - 1, 0));
  for (std::size_t t = 0; t < n; ++t) {
    FieldScalar v = yj * FieldScalar(CycloNumber::zeta(ell, static_cast<long>(t) * (j - 1)));
    if (t + k >= n) v = v * FieldScalar::w(ell);
    m(t, (t + k) % n) = v;
  }
  return m;
}

/// Coordinates lambda with A = sum lambda_{ij} C_ij, ordered (i, j)
/// lexicographically: lambda[(i-1)*ell + (j-1)]. Works for entries in any
/// field containing Q(zeta_ell)(y, w).
///
/// Along the k-th wrapped diagonal the basis matrices C_{k+1, j} are
/// diag(zeta^{t(j-1)} y^{j-1}) times the wrap factor, so the coordinates
/// follow from an inverse DFT of the diagonal entries.
inline std::vector<FieldScalar> express_in_basis(const KMatrix& A, int ell) {
  const auto n = static_cast<std::size_t>(ell);
  if (A.rows() != n || A.cols() != n) throw ShapeError("express_in_basis: expected an ell x ell matrix");
  std::vector<FieldScalar> lambda(n * n);
  FieldScalar w_inv = FieldScalar::w(ell).inverse();
  FieldScalar y_inv = FieldScalar::y(ell).inverse();
  FieldScalar inv_ell(make_rational(1, ell));
  std::vector<FieldScalar> roots;  // zeta^{-m}
  for (std::size_t m = 0; m < n; ++m) roots.emplace_back(CycloNumber::zeta(ell, -static_cast<long>(m)));
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<FieldScalar> a(n);
    bool any = false;
    for (std::size_t t = 0; t < n; ++t) {
      a[t] = A(t, (t + k) % n);
      if (a[t].is_zero()) continue;
      any = true;
      if (t + k >= n) a[t] = a[t] * w_inv;
    }
    if (!any) continue;
    FieldScalar ypow(1L);
    for (std::size_t j = 0; j < n; ++j) {
      FieldScalar mu;
      for (std::size_t t = 0; t < n; ++t)
        if (!a[t].is_zero()) mu = mu + roots[(t * j) % n] * a[t];
      lambda[k * n + j] = mu * inv_ell * ypow;
      ypow = ypow * y_inv;
    }
  }
  return lambda;
}

/// Sum of lambda_{ij} C_ij (inverse of express_in_basis).
inline KMatrix assemble_from_basis(const std::vector<FieldScalar>& lambda, int ell) {
  const auto n = static_cast<std::size_t>(ell);
  if (lambda.size() != n * n) throw ShapeError("assemble_from_basis: expected ell^2 coordinates");
  KMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!lambda[i * n + j].is_zero())
        out += basis_matrix(static_cast<int>(i + 1), static_cast<int>(j + 1), ell).scaled(lambda[i * n + j]);
  return out;
}

/// True when every coordinate is fixed by sigma, i.e. A represents an element of D.
inline bool in_division_algebra(const KMatrix& A, int ell) {
  for (const auto& l : express_in_basis(A, ell))
    if (galois_shift(l, 1, ell) != l) return false;
  return true;
}

struct DRankResult {
  std::size_t r = 0;
  std::vector<std::size_t> row_blocks;
  std::vector<std::size_t> col_blocks;
};

namespace detail {

// Greedy block selection on a modular image. Only returns when the selected
// blocks already have full size min(br, bc); their image being nonsingular
// certifies them over K.
inline std::optional<DRankResult> d_rank_probe(const KMatrix& Tq, std::size_t n, std::size_t br, std::size_t bc) {
  int idx = 1;
  for (const auto& v : Tq.data()) idx = lcm_index(idx, v.index());
  const ModProbe& probe = ModProbe::get(idx, 0);
  auto im = probe.image(Tq);
  if (!im) return std::nullopt;
  DRankResult out;
  std::vector<bool> used(br, false);
  for (std::size_t c = 0; c < bc; ++c) {
    for (std::size_t r = 0; r < br; ++r) {
      if (used[r]) continue;
      const std::size_t k = out.row_blocks.size() + 1;
      Matrix<u64> sub(k * n, k * n);
      auto rows = out.row_blocks, cols = out.col_blocks;
      rows.push_back(r);
      cols.push_back(c);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          sub.set_block(a * n, b * n, im->block(rows[a] * n, cols[b] * n, n, n));
      if (probe.rank(sub) == k * n) {
        used[r] = true;
        out.row_blocks.push_back(r);
        out.col_blocks.push_back(c);
        break;
      }
    }
  }
  if (out.row_blocks.size() != std::min(br, bc)) return std::nullopt;
  return out;
}

}  // namespace detail

/// Rank over D of a matrix viewed as blocks of ell x ell representations.
/// Block Gaussian elimination with the leftmost nonzero block of each block
/// column as pivot (a nonzero element of D is invertible), after a modular
/// shortcut that settles the full-rank case. With `strict`,
/// every block is checked for membership in D and the result against
/// rank/ell.
inline DRankResult d_rank(const KMatrix& Tq, int ell, bool strict = true) {
  const auto n = static_cast<std::size_t>(ell);
  if (Tq.rows() % n || Tq.cols() % n) throw ShapeError("d_rank: size is not a multiple of ell");
  const std::size_t br = Tq.rows() / n, bc = Tq.cols() / n;
  std::vector<std::vector<KMatrix>> B(br, std::vector<KMatrix>(bc));
  for (std::size_t i = 0; i < br; ++i)
    for (std::size_t j = 0; j < bc; ++j) {
      B[i][j] = Tq.block(i * n, j * n, n, n);
      if (strict && ell > 1 && !B[i][j].is_zero() && !in_division_algebra(B[i][j], ell))
        throw std::logic_error("d_rank: block is not in the division algebra");
    }
  DRankResult out;
  if (auto probed = detail::d_rank_probe(Tq, n, br, bc)) {
    out = std::move(*probed);
  } else {
    std::vector<bool> used(br, false);
    for (std::size_t c = 0; c < bc; ++c) {
      std::size_t piv = br;
      for (std::size_t r = 0; r < br; ++r)
        if (!used[r] && !B[r][c].is_zero()) {
          piv = r;
          break;
        }
      if (piv == br) continue;
      auto inv = inverse(B[piv][c]);
      if (!inv) throw std::logic_error("d_rank: nonzero pivot block is singular");
      used[piv] = true;
      out.row_blocks.push_back(piv);
      out.col_blocks.push_back(c);
      for (std::size_t r = 0; r < br; ++r) {
        if (used[r] || B[r][c].is_zero()) continue;
        KMatrix f = B[r][c] * *inv;
        for (std::size_t k = c + 1; k < bc; ++k)
          if (!B[piv][k].is_zero()) B[r][k] -= f * B[piv][k];
        B[r][c] = KMatrix(n, n);
      }
    }
  }
  out.r = out.row_blocks.size();
  std::sort(out.row_blocks.begin(), out.row_blocks.end());
  if (strict && rank(Tq) != out.r * n) throw std::logic_error("d_rank: rank is not ell times the D-rank");
  return out;
}

}  // namespace ncrank
