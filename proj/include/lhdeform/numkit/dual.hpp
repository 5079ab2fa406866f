#pragma once

#include <cmath>
#include <type_traits>

#include "lhdeform/numkit/precision.hpp"

namespace lhdeform {

/// Forward-mode dual number with one tangent direction. Nesting
/// `Dual<Dual<double>>` yields second derivatives, and so on.
template <class T>
struct Dual {
  T v{};  ///< value
  T d{};  ///< tangent

  constexpr Dual() = default;
  constexpr Dual(const T& value) : v(value), d(T{}) {}  // NOLINT: implicit lift of constants
  constexpr Dual(const T& value, const T& tangent) : v(value), d(tangent) {}
  template <class S, class = std::enable_if_t<std::is_arithmetic_v<S> && !std::is_same_v<S, T>>>
  constexpr Dual(S value) : v(T(static_cast<double>(value))), d(T{}) {}  // NOLINT

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) {
    const T q = v / o.v;
    d = (d - q * o.d) / o.v;
    v = q;
    return *this;
  }
};

using Jet0 = double;
using Jet1 = Dual<Jet0>;
using Jet2 = Dual<Jet1>;
using Jet3 = Dual<Jet2>;

// Extended-precision jets for identities whose residual budget is tighter
// than double roundoff on the terms being cancelled.
using ExtJet0 = long double;
using ExtJet1 = Dual<ExtJet0>;
using ExtJet2 = Dual<ExtJet1>;
using ExtJet3 = Dual<ExtJet2>;

template <class T>
struct jet_level : std::integral_constant<int, 0> {};
template <class T>
struct jet_level<Dual<T>> : std::integral_constant<int, jet_level<T>::value + 1> {};
template <class T>
inline constexpr int jet_level_v = jet_level<T>::value;

template <class T>
inline constexpr bool is_dual_v = jet_level_v<T> > 0;

/// Underlying real type of a (possibly nested) jet.
template <class T>
struct jet_base { using type = T; };
template <class T>
struct jet_base<Dual<T>> : jet_base<T> {};
template <class T>
using jet_base_t = typename jet_base<T>::type;

/// Innermost real value of a (possibly nested) jet.
inline double value_of(double x) { return x; }
inline double value_of(long double x) { return static_cast<double>(x); }
#if defined(LHDEFORM_HAVE_QUADMATH)
inline double value_of(Quad x) { return static_cast<double>(x); }
#endif
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.v); }

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a) { return a; }

template <class T> Dual<T> operator+(Dual<T> a, double b) { a.v += b; return a; }
template <class T> Dual<T> operator+(double a, Dual<T> b) { b.v += a; return b; }
template <class T> Dual<T> operator-(Dual<T> a, double b) { a.v -= b; return a; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {b.v * a, b.d * a}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) {
  const T q = a / b.v;
  return {q, -q * b.d / b.v};
}

template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return value_of(a) < value_of(b); }
template <class T> bool operator<(const Dual<T>& a, double b) { return value_of(a) < b; }
template <class T> bool operator>(const Dual<T>& a, double b) { return value_of(a) > b; }

// Elementary functions. Each applies the chain rule with the derivative
// expressed at the inner type, so nesting works to any depth.
template <class T> Dual<T> sin(const Dual<T>& a) { using std::sin, std::cos; return {sin(a.v), cos(a.v) * a.d}; }
template <class T> Dual<T> cos(const Dual<T>& a) { using std::sin, std::cos; return {cos(a.v), -sin(a.v) * a.d}; }
template <class T> Dual<T> exp(const Dual<T>& a) { using std::exp; const T e = exp(a.v); return {e, e * a.d}; }
template <class T> Dual<T> sinh(const Dual<T>& a) { using std::sinh, std::cosh; return {sinh(a.v), cosh(a.v) * a.d}; }
template <class T> Dual<T> cosh(const Dual<T>& a) { using std::sinh, std::cosh; return {cosh(a.v), sinh(a.v) * a.d}; }
template <class T> Dual<T> tanh(const Dual<T>& a) {
  using std::tanh;
  const T th = tanh(a.v);
  return {th, (1.0 - th * th) * a.d};
}
template <class T> Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T> Dual<T> log(const Dual<T>& a) { using std::log; return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> abs(const Dual<T>& a) { return value_of(a) < 0 ? -a : a; }

/// Integer power by repeated multiplication (exact product rule).
template <class T>
T ipow(const T& base, int n) {
  if (n < 0) return T(1.0) / ipow(base, -n);
  T result(1.0);
  T b = base;
  while (n > 0) {
    if (n & 1) result = result * b;
    b = b * b;
    n >>= 1;
  }
  return result;
}

template <class T>
T square(const T& a) { return a * a; }

}  // namespace lhdeform
