#pragma once

// Forward-mode dual numbers.  Dual<Dual<double>> and deeper nestings give
// derivatives of derivatives, which is what nested Lie brackets need.

#include <cmath>
#include <type_traits>

namespace nilcontrol {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // directional derivative

  Dual() = default;
  Dual(double c) : v(c), d(0.0) {}  // NOLINT: constants promote implicitly
  Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }
};

template <class>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }

template <class T> Dual<T> operator+(Dual<T> a, double b) { a.v += b; return a; }
template <class T> Dual<T> operator+(double b, Dual<T> a) { a.v += b; return a; }
template <class T> Dual<T> operator-(Dual<T> a, double b) { a.v -= b; return a; }
template <class T> Dual<T> operator-(double b, const Dual<T>& a) { return {b - a.v, -a.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double b, const Dual<T>& a) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double b, const Dual<T>& a) {
  return {b / a.v, -b * a.d / (a.v * a.v)};
}

using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tan;

template <class T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -sin(a.v) * a.d}; }
template <class T> Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T> Dual<T> tan(const Dual<T>& a) {
  T t = tan(a.v);
  return {t, (1.0 + t * t) * a.d};
}

template <class T> T sec(const T& a) { return 1.0 / cos(a); }

// Scalar types used by the vector-field evaluators: level L carries L
// nested directional derivatives.
template <int L>
struct NestedDual {
  using type = Dual<typename NestedDual<L - 1>::type>;
};
template <>
struct NestedDual<0> {
  using type = double;
};
template <int L>
using Scalar = typename NestedDual<L>::type;

}  // namespace nilcontrol
