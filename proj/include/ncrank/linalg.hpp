#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ncrank/field_scalar.hpp"
#include "ncrank/matrix.hpp"
#include "ncrank/modular.hpp"

namespace ncrank {

/// Rank plus the row and column indices of a nonsingular maximal minor.
struct RankProfile {
  std::size_t rank = 0;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
};

/// Gaussian elimination scanning columns left to right; the pivot row is the
/// first unused row with a nonzero entry.
template <class F>
RankProfile rank_profile(Matrix<F> m) {
  RankProfile out;
  std::vector<bool> used(m.rows(), false);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::size_t piv = m.rows();
    for (std::size_t r = 0; r < m.rows(); ++r)
      if (!used[r] && !is_zero(m(r, c))) {
        piv = r;
        break;
      }
    if (piv == m.rows()) continue;
    used[piv] = true;
    out.rows.push_back(piv);
    out.cols.push_back(c);
    F iv = F(1L) / m(piv, c);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (used[r] || is_zero(m(r, c))) continue;
      F f = m(r, c) * iv;
      for (std::size_t k = c + 1; k < m.cols(); ++k)
        if (!is_zero(m(piv, k))) m(r, k) = m(r, k) - f * m(piv, k);
      m(r, c) = F{};
    }
    if (out.rows.size() == m.rows()) break;
  }
  out.rank = out.rows.size();
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

template <class F>
std::size_t rank(const Matrix<F>& m) {
  return rank_profile(m).rank;
}

/// U * M * V = diag(I_rho, 0) with U, V invertible.
template <class F>
struct PivotForm {
  Matrix<F> U;
  Matrix<F> V;
  std::size_t rho = 0;
};

/// Full pivoting; the pivot at each step is the first nonzero entry of the
/// trailing submatrix in row-major order.
template <class F>
PivotForm<F> pivot_form(const Matrix<F>& input) {
  const std::size_t m = input.rows(), n = input.cols();
  Matrix<F> a = input;
  Matrix<F> U = Matrix<F>::identity(m);
  Matrix<F> V = Matrix<F>::identity(n);
  std::size_t k = 0;
  for (; k < std::min(m, n); ++k) {
    std::size_t pr = m, pc = n;
    for (std::size_t i = k; i < m && pr == m; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (!is_zero(a(i, j))) {
          pr = i;
          pc = j;
          break;
        }
    if (pr == m) break;
    if (pr != k)
      for (std::size_t j = 0; j < std::max(m, n); ++j) {
        if (j < n) std::swap(a(k, j), a(pr, j));
        if (j < m) std::swap(U(k, j), U(pr, j));
      }
    if (pc != k)
      for (std::size_t i = 0; i < std::max(m, n); ++i) {
        if (i < m) std::swap(a(i, k), a(i, pc));
        if (i < n) std::swap(V(i, k), V(i, pc));
      }
    F iv = F(1L) / a(k, k);
    for (std::size_t j = 0; j < n; ++j)
      if (!is_zero(a(k, j))) a(k, j) = a(k, j) * iv;
    for (std::size_t j = 0; j < m; ++j)
      if (!is_zero(U(k, j))) U(k, j) = U(k, j) * iv;
    for (std::size_t i = k + 1; i < m; ++i) {
      if (is_zero(a(i, k))) continue;
      F f = a(i, k);
      for (std::size_t j = k; j < n; ++j)
        if (!is_zero(a(k, j))) a(i, j) = a(i, j) - f * a(k, j);
      for (std::size_t j = 0; j < m; ++j)
        if (!is_zero(U(k, j))) U(i, j) = U(i, j) - f * U(k, j);
    }
    // Row k is now (0 .. 0 1 * .. *); clear the tail with column operations.
    for (std::size_t j = k + 1; j < n; ++j) {
      if (is_zero(a(k, j))) continue;
      F f = a(k, j);
      a(k, j) = F{};
      for (std::size_t i = 0; i < n; ++i)
        if (!is_zero(V(i, k))) V(i, j) = V(i, j) - f * V(i, k);
    }
  }
  return PivotForm<F>{std::move(U), std::move(V), k};
}

/// One solution of A x = b (free variables set to zero), or nullopt when the
/// system is inconsistent.
template <class F>
std::optional<std::vector<F>> solve(const Matrix<F>& A, const std::vector<F>& b) {
  if (b.size() != A.rows()) throw ShapeError("solve: right-hand side length mismatch");
  const std::size_t m = A.rows(), n = A.cols();
  Matrix<F> aug(m, n + 1);
  aug.set_block(0, 0, A);
  for (std::size_t i = 0; i < m; ++i) aug(i, n) = b[i];
  std::vector<std::size_t> pivcol;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < m; ++c) {
    std::size_t piv = m;
    for (std::size_t r = row; r < m; ++r)
      if (!is_zero(aug(r, c))) {
        piv = r;
        break;
      }
    if (piv == m) continue;
    if (piv != row)
      for (std::size_t j = 0; j <= n; ++j) std::swap(aug(row, j), aug(piv, j));
    F iv = F(1L) / aug(row, c);
    for (std::size_t j = c; j <= n; ++j)
      if (!is_zero(aug(row, j))) aug(row, j) = aug(row, j) * iv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || is_zero(aug(r, c))) continue;
      F f = aug(r, c);
      for (std::size_t j = c; j <= n; ++j)
        if (!is_zero(aug(row, j))) aug(r, j) = aug(r, j) - f * aug(row, j);
    }
    pivcol.push_back(c);
    ++row;
  }
  for (std::size_t r = row; r < m; ++r)
    if (!is_zero(aug(r, n))) return std::nullopt;
  std::vector<F> x(n);
  for (std::size_t k = 0; k < pivcol.size(); ++k) x[pivcol[k]] = aug(k, n);
  return x;
}

/// Inverse of a square matrix, or nullopt when singular.
template <class F>
std::optional<Matrix<F>> inverse(const Matrix<F>& A) {
  if (!A.is_square()) throw ShapeError("inverse: matrix is not square");
  const std::size_t n = A.rows();
  Matrix<F> a = A;
  Matrix<F> inv = Matrix<F>::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t r = c; r < n; ++r)
      if (!is_zero(a(r, c))) {
        piv = r;
        break;
      }
    if (piv == n) return std::nullopt;
    if (piv != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(c, j), a(piv, j));
        std::swap(inv(c, j), inv(piv, j));
      }
    F iv = F(1L) / a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      if (!is_zero(a(c, j))) a(c, j) = a(c, j) * iv;
      if (!is_zero(inv(c, j))) inv(c, j) = inv(c, j) * iv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || is_zero(a(r, c))) continue;
      F f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        if (!is_zero(a(c, j))) a(r, j) = a(r, j) - f * a(c, j);
        if (!is_zero(inv(c, j))) inv(r, j) = inv(r, j) - f * inv(c, j);
      }
    }
  }
  return inv;
}

template <class F>
F determinant(Matrix<F> a) {
  if (!a.is_square()) throw ShapeError("determinant: matrix is not square");
  const std::size_t n = a.rows();
  F det(1L);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = n;
    for (std::size_t r = c; r < n; ++r)
      if (!is_zero(a(r, c))) {
        piv = r;
        break;
      }
    if (piv == n) return F{};
    if (piv != c) {
      for (std::size_t j = c; j < n; ++j) std::swap(a(c, j), a(piv, j));
      det = -det;
    }
    det = det * a(c, c);
    F iv = F(1L) / a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (is_zero(a(r, c))) continue;
      F f = a(r, c) * iv;
      for (std::size_t j = c + 1; j < n; ++j)
        if (!is_zero(a(c, j))) a(r, j) = a(r, j) - f * a(c, j);
    }
  }
  return det;
}

/// Rank by fraction-free (Bareiss) elimination over Q(zeta_N)[y, w] after
/// clearing each row's denominators. Independent of the field-level routine.
inline std::size_t bareiss_rank(const Matrix<FieldScalar>& input) {
  const std::size_t m = input.rows(), n = input.cols();
  int idx = 1;
  for (const auto& v : input.data()) idx = lcm_index(idx, v.index());
  Matrix<BiPoly> a(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    BiPoly l(CycloNumber(Rational(1), idx));
    for (std::size_t j = 0; j < n; ++j) {
      const BiPoly& d = input(i, j).den();
      if (d.is_one()) continue;
      BiPoly g = bipoly_gcd(l, d);
      l = l * (g.is_one() ? d : exact_divide(d, g));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const FieldScalar& v = input(i, j);
      a(i, j) = (v.num() * exact_divide(l, v.den())).embedded(idx);
    }
  }
  BiPoly prev(CycloNumber(Rational(1), idx));
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < m; ++c) {
    std::size_t piv = m;
    for (std::size_t r = row; r < m; ++r)
      if (!a(r, c).is_zero()) {
        piv = r;
        break;
      }
    if (piv == m) continue;
    if (piv != row)
      for (std::size_t j = 0; j < n; ++j) std::swap(a(row, j), a(piv, j));
    for (std::size_t r = row + 1; r < m; ++r) {
      for (std::size_t j = c + 1; j < n; ++j)
        a(r, j) = exact_divide(a(row, c) * a(r, j) - a(r, c) * a(row, j), prev);
      a(r, c) = BiPoly(idx);
    }
    prev = a(row, c);
    ++row;
  }
  return row;
}

/// Rank over K. A full-rank modular image settles it; otherwise the
/// fraction-free route decides.
inline std::size_t rank(const Matrix<FieldScalar>& m) {
  const std::size_t full = std::min(m.rows(), m.cols());
  if (full == 0) return 0;
  int idx = 1;
  for (const auto& v : m.data()) idx = lcm_index(idx, v.index());
  for (int which = 0; which < 2; ++which) {
    auto r = ModProbe::get(idx, which).rank_of(m);
    if (r && *r == full) return full;
  }
  return bareiss_rank(m);
}

}  // namespace ncrank
