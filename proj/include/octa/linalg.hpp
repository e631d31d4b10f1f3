#pragma once

#include "octa/field.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace octa {

/// Dense row-major matrix over an exact scalar type (Rational or FieldElement).
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  void append_row(std::span<const T> row) {
    if (rows_ == 0 && cols_ == 0) cols_ = row.size();
    if (row.size() != cols_) throw std::invalid_argument("row length mismatch");
    data_.insert(data_.end(), row.begin(), row.end());
    ++rows_;
  }

  std::vector<T> row(std::size_t r) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

/// In-place reduced row echelon form; returns the pivot columns.
template <class T>
std::vector<std::size_t> rref(Matrix<T>& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && is_zero(m(p, c))) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m(p, k), m(r, k));
    T inv = inverse(m(r, c));
    for (std::size_t k = c; k < m.cols(); ++k) m(r, k) = m(r, k) * inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || is_zero(m(i, c))) continue;
      T f = m(i, c);
      for (std::size_t k = c; k < m.cols(); ++k) m(i, k) = m(i, k) - f * m(r, k);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class T>
std::size_t rank(Matrix<T> m) {
  return rref(m).size();
}

/// Basis of {x : M x = 0}, one vector per free column, read off the RREF.
template <class T>
std::vector<std::vector<T>> kernel(Matrix<T> m) {
  auto pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(m.cols(), T(0));
    v[free] = T(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solves the square system A x = b; nullopt when A is singular.
template <class T>
std::optional<std::vector<T>> solve(const Matrix<T>& a, std::span<const T> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve expects a square system");
  Matrix<T> aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv.back() >= n) return std::nullopt;
  std::vector<T> x(n, T(0));
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

using IntVector = std::vector<Integer>;

/// Basis over Q of the rational vectors v with M v = 0, where M has entries
/// in a multi-quadratic field. Each row is split into its 2^k rational
/// component rows; the kernel vectors come back primitive (gcd 1, leading
/// entry positive) in reduced echelon order.
inline std::vector<IntVector> rational_kernel(const Matrix<FieldElement>& m) {
  Matrix<Rational> stacked(0, m.cols());
  int dim = 1;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) dim = std::max(dim, m(i, j).dimension());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (int comp = 0; comp < dim; ++comp) {
      std::vector<Rational> row(m.cols());
      for (std::size_t j = 0; j < m.cols(); ++j) {
        const FieldElement& e = m(i, j);
        row[j] = comp < e.dimension() ? e.coeff(static_cast<unsigned>(comp)) : Rational(0);
      }
      stacked.append_row(row);
    }
  }
  std::vector<IntVector> out;
  if (m.rows() == 0) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      IntVector e(m.cols(), 0);
      e[j] = 1;
      out.push_back(e);
    }
    return out;
  }
  for (auto& v : kernel(stacked)) out.push_back(primitive_integer(v));
  return out;
}

}  // namespace octa
