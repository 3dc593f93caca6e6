#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "combasym/numeric.hpp"

namespace combasym {

template <class T>
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<T> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, T(0)) {}
  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

template <class T>
std::vector<T> operator*(const Matrix<T>& m, const std::vector<T>& x) {
  std::vector<T> y(m.rows, T(0));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) y[i] += m(i, j) * x[j];
  return y;
}

template <class T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k)
      for (int j = 0; j < b.cols; ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

template <class T>
Matrix<T> identity_minus(const Matrix<T>& m) {
  Matrix<T> r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r(i, j) = (i == j ? T(1) : T(0)) - m(i, j);
  return r;
}

template <class T>
struct LU {
  Matrix<T> lu;
  std::vector<int> perm;
  int sign = 1;
  bool singular = false;

  explicit LU(Matrix<T> m) : lu(std::move(m)), perm(lu.rows) {
    int n = lu.rows;
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
      int p = k;
      Real best = magnitude(lu(k, k));
      for (int i = k + 1; i < n; ++i) {
        Real v = magnitude(lu(i, k));
        if (v > best) { best = v; p = i; }
      }
      if (p != k) {
        for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
        std::swap(perm[k], perm[p]);
        sign = -sign;
      }
      if (best == 0) { singular = true; continue; }
      if (k == n - 1) break;
      for (int i = k + 1; i < n; ++i) {
        T f = lu(i, k) / lu(k, k);
        lu(i, k) = f;
        for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      }
    }
  }

  T det() const {
    T d(sign);
    for (int i = 0; i < lu.rows; ++i) d *= lu(i, i);
    return d;
  }

  std::vector<T> solve(const std::vector<T>& b) const {
    int n = lu.rows;
    std::vector<T> x(n);
    for (int i = 0; i < n; ++i) {
      T s = b[perm[i]];
      for (int j = 0; j < i; ++j) s -= lu(i, j) * x[j];
      x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      T s = x[i];
      for (int j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
      x[i] = s / lu(i, i);
    }
    return x;
  }

  Matrix<T> inverse() const {
    int n = lu.rows;
    Matrix<T> inv(n, n);
    for (int j = 0; j < n; ++j) {
      std::vector<T> e(n, T(0));
      e[j] = T(1);
      auto c = solve(e);
      for (int i = 0; i < n; ++i) inv(i, j) = c[i];
    }
    return inv;
  }
};

// Determinant by elimination without division by the last pivot, so it stays
// well defined (and differentiable through Dual) at singular points.
template <class T>
T determinant(Matrix<T> m) {
  int n = m.rows;
  T d(1);
  for (int k = 0; k < n; ++k) {
    int p = k;
    Real best = magnitude(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      Real v = magnitude(m(i, k));
      if (v > best) { best = v; p = i; }
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      d = -d;
    }
    d *= m(k, k);
    if (k == n - 1 || best == 0) continue;
    for (int i = k + 1; i < n; ++i) {
      T f = m(i, k) / m(k, k);
      for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return d;
}

template <class T>
Real norm_inf(const std::vector<T>& v) {
  Real r = 0;
  for (const auto& x : v) {
    Real a = magnitude(x);
    if (a > r) r = a;
  }
  return r;
}

}  // namespace combasym
