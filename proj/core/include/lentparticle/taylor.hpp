#pragma once
/// Second-order univariate Taylor arithmetic.
///
/// A value t represents f(0), f'(0), f''(0) of a function of one real
/// parameter. Evaluating a smooth map on Taylor inputs propagates first and
/// second directional derivatives exactly.

#include <cmath>
#include <type_traits>

namespace lp {

struct Taylor {
  double v = 0.0;   // value
  double d1 = 0.0;  // first derivative
  double d2 = 0.0;  // second derivative

  constexpr Taylor() = default;
  constexpr Taylor(double value) : v(value) {}  // NOLINT: implicit promotion from constants
  constexpr Taylor(double value, double first, double second) : v(value), d1(first), d2(second) {}

  static constexpr Taylor variable(double value, double direction) { return {value, direction, 0.0}; }

  Taylor& operator+=(const Taylor& o) { v += o.v; d1 += o.d1; d2 += o.d2; return *this; }
  Taylor& operator-=(const Taylor& o) { v -= o.v; d1 -= o.d1; d2 -= o.d2; return *this; }
  Taylor& operator*=(const Taylor& o) { *this = *this * o; return *this; }
  Taylor& operator/=(const Taylor& o) { *this = *this / o; return *this; }

  friend constexpr Taylor operator+(const Taylor& a, const Taylor& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
  friend constexpr Taylor operator-(const Taylor& a, const Taylor& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
  friend constexpr Taylor operator-(const Taylor& a) { return {-a.v, -a.d1, -a.d2}; }
  friend constexpr Taylor operator*(const Taylor& a, const Taylor& b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
  }
  friend constexpr Taylor operator/(const Taylor& a, const Taylor& b) {
    const double q = a.v / b.v;
    const double q1 = (a.d1 - q * b.d1) / b.v;
    const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
    return {q, q1, q2};
  }
};

/// Chain rule for a scalar function with derivatives f0, f1, f2 at x.v.
constexpr Taylor compose(const Taylor& x, double f0, double f1, double f2) {
  return {f0, f1 * x.d1, f2 * x.d1 * x.d1 + f1 * x.d2};
}

inline Taylor sqrt(const Taylor& x) {
  const double s = std::sqrt(x.v);
  return compose(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline Taylor exp(const Taylor& x) {
  const double e = std::exp(x.v);
  return compose(x, e, e, e);
}
inline Taylor log(const Taylor& x) { return compose(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v)); }
inline Taylor sin(const Taylor& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return compose(x, s, c, -s);
}
inline Taylor cos(const Taylor& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return compose(x, c, -s, -c);
}
inline Taylor pow(const Taylor& x, double p) {
  if (p == 0.0) return Taylor(1.0);
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  const double f0 = std::pow(x.v, p);
  const double f1 = p * std::pow(x.v, p - 1.0);
  const double f2 = p * (p - 1.0) * std::pow(x.v, p - 2.0);
  return compose(x, f0, f1, f2);
}
inline Taylor abs(const Taylor& x) { return x.v < 0 ? -x : x; }

template <class T>
constexpr double value_of(const T& x) {
  if constexpr (std::is_same_v<T, Taylor>) return x.v;
  else return static_cast<double>(x);
}

/// pow that works for both double and Taylor and keeps integer powers exact.
template <class T>
inline T ipow(const T& x, double p) {
  if constexpr (std::is_same_v<T, double>) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    return std::pow(x, p);
  } else {
    return pow(x, p);
  }
}

}  // namespace lp
