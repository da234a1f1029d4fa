#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ncrank/rational.hpp"

namespace ncrank {

inline bool is_zero(std::uint64_t v) { return v == 0; }

namespace detail {
template <class F>
bool entry_is_zero(const F& v) {
  return is_zero(v);
}
}  // namespace detail

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major matrix over a field-like value type F.
///
/// F needs value semantics, F{} == 0, construction from long, the four
/// arithmetic operators, equality and a free is_zero(const F&).
template <class F>
class Matrix {
 public:
  using value_type = F;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<F> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) throw ShapeError("matrix data length does not match shape");
  }
  Matrix(std::initializer_list<std::initializer_list<F>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ShapeError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = F(1L);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  const std::vector<F>& data() const { return data_; }
  std::vector<F>& data() { return data_; }

  F& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const F& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& v : data_)
      if (!ncrank_is_zero(v)) return false;
    return true;
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw ShapeError("block out of range");
    Matrix out(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw ShapeError("block out of range");
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix submatrix(const std::vector<std::size_t>& rs, const std::vector<std::size_t>& cs) const {
    Matrix out(rs.size(), cs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cs.size(); ++j) out(i, j) = (*this)(rs[i], cs[j]);
    return out;
  }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  Matrix scaled(const F& c) const {
    Matrix out = *this;
    if (ncrank_is_zero(c)) return Matrix(rows_, cols_);
    for (auto& v : out.data_)
      if (!ncrank_is_zero(v)) v = v * c;
    return out;
  }

  template <class Fn>
  auto map(Fn&& fn) const -> Matrix<decltype(fn(std::declval<const F&>()))> {
    using G = decltype(fn(std::declval<const F&>()));
    std::vector<G> out;
    out.reserve(data_.size());
    for (const auto& v : data_) out.push_back(fn(v));
    return Matrix<G>(rows_, cols_, std::move(out));
  }

  Matrix& operator+=(const Matrix& b) {
    check_same(b);
    for (std::size_t k = 0; k < data_.size(); ++k)
      if (!ncrank_is_zero(b.data_[k])) data_[k] = data_[k] + b.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& b) {
    check_same(b);
    for (std::size_t k = 0; k < data_.size(); ++k)
      if (!ncrank_is_zero(b.data_[k])) data_[k] = data_[k] - b.data_[k];
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ShapeError("matrix product shape mismatch");
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const F& aik = a(i, k);
        if (ncrank_is_zero(aik)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          const F& bkj = b(k, j);
          if (ncrank_is_zero(bkj)) continue;
          out(i, j) = out(i, j) + aik * bkj;
        }
      }
    return out;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

 private:
  static bool ncrank_is_zero(const F& v) { return detail::entry_is_zero(v); }
  void check_same(const Matrix& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw ShapeError("matrix shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<F> data_;
};

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
template <class F>
Matrix<F> kron(const Matrix<F>& a, const Matrix<F>& b) {
  Matrix<F> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (is_zero(a(i, j))) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return out;
}

/// A (x) I_d.
template <class F>
Matrix<F> tensor_with_identity(const Matrix<F>& a, std::size_t d) {
  if (d == 0) throw ShapeError("tensor_with_identity: d must be positive");
  Matrix<F> out(a.rows() * d, a.cols() * d);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (is_zero(a(i, j))) continue;
      for (std::size_t k = 0; k < d; ++k) out(i * d + k, j * d + k) = a(i, j);
    }
  return out;
}

/// Assembles a grid of blocks; blocks in a block-row share a height and
/// blocks in a block-column share a width.
template <class F>
Matrix<F> block_assemble(const std::vector<std::vector<Matrix<F>>>& blocks) {
  if (blocks.empty()) return {};
  std::size_t grid_cols = blocks[0].size();
  std::vector<std::size_t> heights, widths(grid_cols);
  for (const auto& row : blocks) {
    if (row.size() != grid_cols) throw ShapeError("ragged block grid");
    heights.push_back(row.empty() ? 0 : row[0].rows());
  }
  for (std::size_t j = 0; j < grid_cols; ++j) widths[j] = blocks[0][j].cols();
  std::size_t total_r = 0, total_c = 0;
  for (auto h : heights) total_r += h;
  for (auto w : widths) total_c += w;
  Matrix<F> out(total_r, total_c);
  std::size_t r0 = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    std::size_t c0 = 0;
    for (std::size_t j = 0; j < grid_cols; ++j) {
      const auto& b = blocks[i][j];
      if (b.rows() != heights[i] || b.cols() != widths[j]) throw ShapeError("block shape mismatch in grid");
      out.set_block(r0, c0, b);
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  return out;
}

}  // namespace ncrank
