#pragma once

#include <cmath>
#include <type_traits>

#if defined(LHDEFORM_HAVE_QUADMATH)
#include <quadmath.h>
#endif

namespace lhdeform {

/// Widest real type available: binary128 through libquadmath when the
/// build enables it, long double otherwise.
#if defined(LHDEFORM_HAVE_QUADMATH)
using Quad = __float128;
#else
using Quad = long double;
#endif

inline constexpr bool kQuadIsDistinct = !std::is_same_v<Quad, long double>;

namespace quad {

#if defined(LHDEFORM_HAVE_QUADMATH)
inline bool isfinite(Quad x) { return finiteq(x) != 0; }
inline Quad abs(Quad x) { return fabsq(x); }
inline Quad exp(Quad x) { return expq(x); }
inline Quad sinh(Quad x) { return sinhq(x); }
inline Quad cosh(Quad x) { return coshq(x); }
inline Quad tanh(Quad x) { return tanhq(x); }
#else
inline bool isfinite(Quad x) { return std::isfinite(x); }
inline Quad abs(Quad x) { return std::abs(x); }
inline Quad exp(Quad x) { return std::exp(x); }
inline Quad sinh(Quad x) { return std::sinh(x); }
inline Quad cosh(Quad x) { return std::cosh(x); }
inline Quad tanh(Quad x) { return std::tanh(x); }
#endif

}  // namespace quad

}  // namespace lhdeform
