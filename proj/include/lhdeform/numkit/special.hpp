#pragma once

#include <cmath>
#include <string>
#include <type_traits>

#include "lhdeform/errors.hpp"
#include "lhdeform/numkit/dual.hpp"

namespace lhdeform {

/// Below this magnitude shc and shc_prime use their Taylor polynomials.
inline constexpr double kShcSeriesCutoff = 1e-2;

/// Largest hyperbolic/exponential argument accepted before overflow.
inline constexpr double kOverflowArgument = 700.0;

namespace detail {

template <class F>
inline constexpr bool is_real_v = std::is_floating_point_v<F>;

template <class F>
void require_finite(F x, const char* fn) {
  if (!std::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
}

template <class F>
void require_in_range(F x, const char* fn) {
  if (std::abs(x) > kOverflowArgument)
    throw RangeError(std::string(fn) + ": |argument| " + std::to_string(static_cast<double>(std::abs(x))) +
                     " exceeds " + std::to_string(kOverflowArgument));
}

// n-th derivative of  s(x) = int_0^1 g(x t) dt  with g = cosh (shc) or
// g = cos (sinc). Uses the power series for |x| < 1 and the recurrence
// x s^(n) + n s^(n-1) = G^(n)(x), G = sinh or sin, otherwise.
template <class F>
F cardinal_derivative(int n, F x, bool hyperbolic) {
  if (std::abs(x) < F(1)) {
    // s^(n)(x) = sum_{2k >= n} sgn^k (2k)! / ((2k-n)! (2k+1)!) x^(2k-n)
    F sum = 0;
    for (int k = (n + 1) / 2; k < 40; ++k) {
      const int p = 2 * k - n;
      F coeff = std::exp(std::lgamma(F(2 * k + 1)) - std::lgamma(F(p + 1)) - std::lgamma(F(2 * k + 2)));
      if (!hyperbolic && (k % 2 == 1)) coeff = -coeff;
      const F term = coeff * (p == 0 ? F(1) : std::pow(x, p));
      sum += term;
      if (k > (n + 1) / 2 + 2 && std::abs(term) < F(1e-21) * std::abs(sum)) break;
    }
    return sum;
  }
  F s = hyperbolic ? std::sinh(x) / x : std::sin(x) / x;
  for (int k = 1; k <= n; ++k) {
    F g;
    if (hyperbolic) {
      g = (k % 2 == 0) ? std::sinh(x) : std::cosh(x);
    } else {
      switch (k % 4) {
        case 0: g = std::sin(x); break;
        case 1: g = std::cos(x); break;
        case 2: g = -std::sin(x); break;
        default: g = -std::cos(x); break;
      }
    }
    s = (g - F(k) * s) / x;
  }
  return s;
}

template <class F>
F shc_real(F x) {
  require_finite(x, "shc");
  if (std::abs(x) < F(kShcSeriesCutoff)) {
    const F x2 = x * x;
    return 1 + x2 * (F(1) / 6 + x2 * (F(1) / 120 + x2 * (F(1) / 5040 + x2 * (F(1) / 362880))));
  }
  require_in_range(x, "shc");
  return std::sinh(x) / x;
}

template <class F>
F shc_prime_real(F x) {
  require_finite(x, "shc_prime");
  if (std::abs(x) < F(kShcSeriesCutoff)) {
    const F x2 = x * x;
    return x * (F(1) / 3 + x2 * (F(1) / 30 + x2 * (F(1) / 840 + x2 * (F(1) / 45360))));
  }
  require_in_range(x, "shc_prime");
  // (ch - shc)/x cancels for small x; the full series is exact there.
  if (std::abs(x) < F(1)) return cardinal_derivative(1, x, true);
  return (std::cosh(x) - std::sinh(x) / x) / x;
}

template <class F>
F sinc_real(F x) {
  require_finite(x, "sinc");
  if (std::abs(x) < F(kShcSeriesCutoff)) {
    const F x2 = x * x;
    return 1 - x2 * (F(1) / 6 - x2 * (F(1) / 120 - x2 * (F(1) / 5040 - x2 * (F(1) / 362880))));
  }
  return std::sin(x) / x;
}

template <class F>
F sinc_prime_real(F x) {
  require_finite(x, "sinc_prime");
  if (std::abs(x) < F(kShcSeriesCutoff)) {
    const F x2 = x * x;
    return -x * (F(1) / 3 - x2 * (F(1) / 30 - x2 * (F(1) / 840 - x2 * (F(1) / 45360))));
  }
  if (std::abs(x) < F(1)) return cardinal_derivative(1, x, false);
  return (std::cos(x) - std::sin(x) / x) / x;
}

template <class F>
F sh_real(F x) {
  require_finite(x, "sh");
  require_in_range(x, "sh");
  return std::sinh(x);
}

template <class F>
F ch_real(F x) {
  require_finite(x, "ch");
  require_in_range(x, "ch");
  return std::cosh(x);
}

template <class F>
F th_real(F x) {
  require_finite(x, "th");
  return std::tanh(x);
}

}  // namespace detail

/// Guarded hyperbolic sine, cosine and tangent. `sh` and `ch` raise
/// RangeError beyond kOverflowArgument instead of returning infinity.
inline double sh(double x) { return detail::sh_real(x); }
inline double ch(double x) { return detail::ch_real(x); }
inline double th(double x) { return detail::th_real(x); }
inline long double sh(long double x) { return detail::sh_real(x); }
inline long double ch(long double x) { return detail::ch_real(x); }
inline long double th(long double x) { return detail::th_real(x); }

template <class T>
Dual<T> sh(const Dual<T>& a) {
  detail::require_in_range(value_of(a), "sh");
  return {sh(a.v), ch(a.v) * a.d};
}
template <class T>
Dual<T> ch(const Dual<T>& a) {
  detail::require_in_range(value_of(a), "ch");
  return {ch(a.v), sh(a.v) * a.d};
}
template <class T>
Dual<T> th(const Dual<T>& a) {
  const T t = th(a.v);
  return {t, (1.0 - t * t) * a.d};
}

/// Hyperbolic sinc sh(x)/x, equal to 1 at the origin.
inline double shc(double x) { return detail::shc_real(x); }
inline long double shc(long double x) { return detail::shc_real(x); }

/// d/dx shc(x) = (ch(x) - shc(x))/x, odd, zero at the origin.
inline double shc_prime(double x) { return detail::shc_prime_real(x); }
inline long double shc_prime(long double x) { return detail::shc_prime_real(x); }

/// Trigonometric sinc sin(x)/x, equal to 1 at the origin.
inline double sinc(double x) { return detail::sinc_real(x); }
inline long double sinc(long double x) { return detail::sinc_real(x); }

inline double sinc_prime(double x) { return detail::sinc_prime_real(x); }
inline long double sinc_prime(long double x) { return detail::sinc_prime_real(x); }

#if defined(LHDEFORM_HAVE_QUADMATH)
namespace detail {

inline void require_finite_quad(Quad x, const char* fn) {
  if (!quad::isfinite(x)) throw DomainError(std::string(fn) + ": non-finite argument");
}

inline void require_in_range_quad(Quad x, const char* fn) {
  if (quad::abs(x) > kOverflowArgument)
    throw RangeError(std::string(fn) + ": |argument| " + std::to_string(static_cast<double>(quad::abs(x))) +
                     " exceeds " + std::to_string(kOverflowArgument));
}

}  // namespace detail

inline Quad sh(Quad x) {
  detail::require_finite_quad(x, "sh");
  detail::require_in_range_quad(x, "sh");
  return quad::sinh(x);
}
inline Quad ch(Quad x) {
  detail::require_finite_quad(x, "ch");
  detail::require_in_range_quad(x, "ch");
  return quad::cosh(x);
}
inline Quad th(Quad x) {
  detail::require_finite_quad(x, "th");
  return quad::tanh(x);
}
inline Quad shc(Quad x) {
  detail::require_finite_quad(x, "shc");
  if (quad::abs(x) < kShcSeriesCutoff) {
    // Terms through x^14 / 15! keep truncation below binary128 epsilon.
    const Quad x2 = x * x;
    Quad sum = 1, term = 1;
    for (int k = 1; k <= 7; ++k) {
      term = term * x2 / Quad((2 * k) * (2 * k + 1));
      sum += term;
    }
    return sum;
  }
  detail::require_in_range_quad(x, "shc");
  return quad::sinh(x) / x;
}
inline Quad shc_prime(Quad x) {
  detail::require_finite_quad(x, "shc_prime");
  if (quad::abs(x) < kShcSeriesCutoff) {
    // sum_k 2k x^(2k-1) / (2k+1)!
    const Quad x2 = x * x;
    Quad sum = 0, term = x / Quad(6);
    for (int k = 1; k <= 7; ++k) {
      sum += Quad(2 * k) * term;
      term = term * x2 / Quad((2 * k + 2) * (2 * k + 3));
    }
    return sum;
  }
  detail::require_in_range_quad(x, "shc_prime");
  return (quad::cosh(x) - quad::sinh(x) / x) / x;
}
#endif

/// exp on every supported real or jet type.
inline double exp_any(double x) { return std::exp(x); }
inline long double exp_any(long double x) { return std::exp(x); }
#if defined(LHDEFORM_HAVE_QUADMATH)
inline Quad exp_any(Quad x) { return quad::exp(x); }
#endif
template <class T>
Dual<T> exp_any(const Dual<T>& a) {
  const T e = exp_any(a.v);
  return {e, e * a.d};
}

/// N-th derivative of shc (N = 0 is shc itself), for plain or dual arguments.
template <int N, class F, std::enable_if_t<detail::is_real_v<F>, int> = 0>
F shc_derivative(F x) {
  if constexpr (N == 0) {
    return shc(x);
  } else if constexpr (N == 1) {
    return shc_prime(x);
  } else {
    detail::require_finite(x, "shc_derivative");
    detail::require_in_range(x, "shc_derivative");
    return detail::cardinal_derivative(N, x, true);
  }
}

template <int N, class T>
Dual<T> shc_derivative(const Dual<T>& a) {
  return {shc_derivative<N>(a.v), shc_derivative<N + 1>(a.v) * a.d};
}

template <int N, class F, std::enable_if_t<detail::is_real_v<F>, int> = 0>
F sinc_derivative(F x) {
  if constexpr (N == 0) {
    return sinc(x);
  } else if constexpr (N == 1) {
    return sinc_prime(x);
  } else {
    detail::require_finite(x, "sinc_derivative");
    return detail::cardinal_derivative(N, x, false);
  }
}

template <int N, class T>
Dual<T> sinc_derivative(const Dual<T>& a) {
  return {sinc_derivative<N>(a.v), sinc_derivative<N + 1>(a.v) * a.d};
}

template <class T>
Dual<T> shc(const Dual<T>& a) { return shc_derivative<0>(a); }
template <class T>
Dual<T> shc_prime(const Dual<T>& a) { return shc_derivative<1>(a); }
template <class T>
Dual<T> sinc(const Dual<T>& a) { return sinc_derivative<0>(a); }

}  // namespace lhdeform
