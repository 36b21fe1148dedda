#pragma once
/// Fixed-capacity vectors and matrices for the per-jump recursions.
///
/// State dimensions in this library are tiny (d <= 4) and the element type
/// must be either double or Taylor, so these stay deliberately minimal.

#include <array>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>

#include "lentparticle/taylor.hpp"

namespace lp {

inline constexpr int kMaxDim = 4;

template <class T>
struct SVec {
  int n = 0;
  std::array<T, kMaxDim> a{};

  SVec() = default;
  explicit SVec(int size) : n(size) { a.fill(T(0.0)); }

  T& operator[](int i) { return a[i]; }
  const T& operator[](int i) const { return a[i]; }
  int size() const { return n; }
};

template <class T>
struct SMat {
  int r = 0, c = 0;
  std::array<T, kMaxDim * kMaxDim> a{};

  SMat() = default;
  SMat(int rows, int cols) : r(rows), c(cols) { a.fill(T(0.0)); }

  static SMat identity(int n) {
    SMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  T& operator()(int i, int j) { return a[i * kMaxDim + j]; }
  const T& operator()(int i, int j) const { return a[i * kMaxDim + j]; }
  int rows() const { return r; }
  int cols() const { return c; }
};

template <class T>
SVec<T> operator+(SVec<T> x, const SVec<T>& y) {
  for (int i = 0; i < x.n; ++i) x[i] += y[i];
  return x;
}
template <class T>
SVec<T> operator-(SVec<T> x, const SVec<T>& y) {
  for (int i = 0; i < x.n; ++i) x[i] -= y[i];
  return x;
}
template <class T, class S>
SVec<T> scale(SVec<T> x, const S& s) {
  for (int i = 0; i < x.n; ++i) x[i] = x[i] * s;
  return x;
}

template <class T>
SMat<T> operator+(SMat<T> x, const SMat<T>& y) {
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j) x(i, j) += y(i, j);
  return x;
}
template <class T>
SMat<T> operator-(SMat<T> x, const SMat<T>& y) {
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j) x(i, j) -= y(i, j);
  return x;
}
template <class T, class S>
SMat<T> scale(SMat<T> x, const S& s) {
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j) x(i, j) = x(i, j) * s;
  return x;
}

template <class T>
SMat<T> operator*(const SMat<T>& x, const SMat<T>& y) {
  assert(x.c == y.r);
  SMat<T> z(x.r, y.c);
  for (int i = 0; i < x.r; ++i)
    for (int k = 0; k < x.c; ++k)
      for (int j = 0; j < y.c; ++j) z(i, j) += x(i, k) * y(k, j);
  return z;
}

template <class T>
SVec<T> operator*(const SMat<T>& x, const SVec<T>& v) {
  assert(x.c == v.n);
  SVec<T> z(x.r);
  for (int i = 0; i < x.r; ++i)
    for (int k = 0; k < x.c; ++k) z[i] += x(i, k) * v[k];
  return z;
}

template <class T>
SMat<T> transpose(const SMat<T>& x) {
  SMat<T> z(x.c, x.r);
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j) z(j, i) = x(i, j);
  return z;
}

/// x y^T
template <class T>
SMat<T> outer(const SVec<T>& x, const SVec<T>& y) {
  SMat<T> z(x.n, y.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < y.n; ++j) z(i, j) = x[i] * y[j];
  return z;
}

/// A B A^T
template <class T>
SMat<T> congruence(const SMat<T>& a, const SMat<T>& b) {
  return a * b * transpose(a);
}

template <class T>
T determinant(const SMat<T>& m) {
  assert(m.r == m.c);
  const int n = m.r;
  if (n == 0) return T(1.0);
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  // Gaussian elimination with partial pivoting on values.
  SMat<T> a = m;
  T det(1.0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(value_of(a(i, k))) > std::abs(value_of(a(p, k)))) p = i;
    if (value_of(a(p, k)) == 0.0) return T(0.0);
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      det = -det;
    }
    det = det * a(k, k);
    for (int i = k + 1; i < n; ++i) {
      const T f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

/// Inverse by Gauss-Jordan with partial pivoting. Caller checks the determinant.
template <class T>
SMat<T> inverse(const SMat<T>& m) {
  assert(m.r == m.c);
  const int n = m.r;
  if (n == 1) {
    SMat<T> z(1, 1);
    z(0, 0) = T(1.0) / m(0, 0);
    return z;
  }
  if (n == 2) {
    const T det = determinant(m);
    SMat<T> z(2, 2);
    z(0, 0) = m(1, 1) / det;
    z(1, 1) = m(0, 0) / det;
    z(0, 1) = -m(0, 1) / det;
    z(1, 0) = -m(1, 0) / det;
    return z;
  }
  SMat<T> a = m;
  SMat<T> z = SMat<T>::identity(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(value_of(a(i, k))) > std::abs(value_of(a(p, k)))) p = i;
    if (p != k) {
      for (int j = 0; j < n; ++j) {
        std::swap(a(k, j), a(p, j));
        std::swap(z(k, j), z(p, j));
      }
    }
    const T piv = a(k, k);
    for (int j = 0; j < n; ++j) {
      a(k, j) = a(k, j) / piv;
      z(k, j) = z(k, j) / piv;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      const T f = a(i, k);
      for (int j = 0; j < n; ++j) {
        a(i, j) -= f * a(k, j);
        z(i, j) -= f * z(k, j);
      }
    }
  }
  return z;
}

template <class T>
double max_abs(const SMat<T>& m) {
  double r = 0.0;
  for (int i = 0; i < m.r; ++i)
    for (int j = 0; j < m.c; ++j) r = std::max(r, std::abs(value_of(m(i, j))));
  return r;
}

/// Value part of a Taylor-valued object.
inline SVec<double> values(const SVec<Taylor>& x) {
  SVec<double> z(x.n);
  for (int i = 0; i < x.n; ++i) z[i] = x[i].v;
  return z;
}
inline SMat<double> values(const SMat<Taylor>& x) {
  SMat<double> z(x.r, x.c);
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j) z(i, j) = x(i, j).v;
  return z;
}
inline SMat<double> first_derivs(const SMat<Taylor>& x) {
  SMat<double> z(x.r, x.c);
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j) z(i, j) = x(i, j).d1;
  return z;
}
inline SMat<double> second_derivs(const SMat<Taylor>& x) {
  SMat<double> z(x.r, x.c);
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j) z(i, j) = x(i, j).d2;
  return z;
}

/// Smallest eigenvalue of a symmetric matrix (double only).
double min_eigenvalue(const SMat<double>& m);

}  // namespace lp
