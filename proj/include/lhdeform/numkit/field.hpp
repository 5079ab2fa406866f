#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>

#include "lhdeform/errors.hpp"
#include "lhdeform/numkit/dual.hpp"
#include "lhdeform/numkit/tolerances.hpp"

namespace lhdeform {

template <class T>
struct Vec2 {
  T x{};
  T y{};
};

using Point2 = Vec2<double>;

template <class T> Vec2<T> operator+(const Vec2<T>& a, const Vec2<T>& b) { return {a.x + b.x, a.y + b.y}; }
template <class T> Vec2<T> operator-(const Vec2<T>& a, const Vec2<T>& b) { return {a.x - b.x, a.y - b.y}; }
template <class T> Vec2<T> operator*(double s, const Vec2<T>& a) { return {s * a.x, s * a.y}; }
template <class T> Vec2<T> operator*(const Vec2<T>& a, double s) { return {s * a.x, s * a.y}; }

inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Open planar chart described by a margin function: a point is inside
/// when margin(p) exceeds the caller's domain margin. The margin is the
/// distance-like quantity to the singular set (|x|, |v|, |u - v|, ...).
struct Chart {
  std::string name = "plane";
  std::function<double(const Point2&)> margin = [](const Point2&) {
    return std::numeric_limits<double>::infinity();
  };

  bool contains(const Point2& p, double domain_margin) const {
    const double m = margin(p);
    return std::isfinite(p.x) && std::isfinite(p.y) && m > domain_margin;
  }

  void require(const Point2& p, double domain_margin) const {
    if (!contains(p, domain_margin))
      throw DomainError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                        ") outside chart '" + name + "'");
  }

  static Chart plane() { return {}; }

  static Chart intersect(const Chart& a, const Chart& b) {
    if (a.name == "plane") return b;
    if (b.name == "plane" || a.name == b.name) return a;
    Chart c;
    c.name = a.name + "&" + b.name;
    c.margin = [ma = a.margin, mb = b.margin](const Point2& p) { return std::min(ma(p), mb(p)); };
    return c;
  }
};

/// Real function on a planar chart, evaluable on plain doubles and on
/// nested dual numbers up to third order, in double or long double, and
/// on Quad values without derivatives. Immutable and cheap to copy.
///
/// Fields built from a generic callable support every jet level. Derived
/// fields (partials, brackets, Hamiltonian components) lose one level per
/// derivative they consume; asking for a level that is no longer
/// available throws DomainError.
class ScalarField {
 public:
  static constexpr int kMaxLevel = 3;

  ScalarField() : ScalarField(from([](auto, auto) { return 0.0; })) {}

  /// Wraps `f(x, y)`, which must be callable on every jet type.
  template <class F>
  static ScalarField from(F f, Chart chart = Chart::plane()) {
    return derived(kMaxLevel, std::move(chart), std::move(f));
  }

  /// Wraps a callable that may itself evaluate deeper jets of other fields.
  template <class G>
  static ScalarField derived(int level, Chart chart, G g) {
    auto impl = std::make_shared<Impl>();
    impl->level = level;
    impl->chart = std::move(chart);
    impl->f0 = [g](const Jet0& x, const Jet0& y) { return Jet0(g(x, y)); };
    impl->f1 = [g](const Jet1& x, const Jet1& y) { return Jet1(g(x, y)); };
    impl->f2 = [g](const Jet2& x, const Jet2& y) { return Jet2(g(x, y)); };
    impl->f3 = [g](const Jet3& x, const Jet3& y) { return Jet3(g(x, y)); };
    impl->e0 = [g](const ExtJet0& x, const ExtJet0& y) { return ExtJet0(g(x, y)); };
    impl->e1 = [g](const ExtJet1& x, const ExtJet1& y) { return ExtJet1(g(x, y)); };
    impl->e2 = [g](const ExtJet2& x, const ExtJet2& y) { return ExtJet2(g(x, y)); };
    impl->e3 = [g](const ExtJet3& x, const ExtJet3& y) { return ExtJet3(g(x, y)); };
#if defined(LHDEFORM_HAVE_QUADMATH)
    impl->q0 = [g](const Quad& x, const Quad& y) { return Quad(g(x, y)); };
#endif
    ScalarField s(std::move(impl));
    return s;
  }

  template <class T>
  T eval(const T& x, const T& y) const {
    constexpr int lvl = jet_level_v<T>;
    if constexpr (lvl > kMaxLevel) {
      throw DomainError("derivative depth exhausted");
    } else {
      if (lvl > impl_->level) throw DomainError("derivative depth exhausted");
      using B = jet_base_t<T>;
      if constexpr (std::is_same_v<B, double>) {
        if constexpr (lvl == 0) return impl_->f0(x, y);
        else if constexpr (lvl == 1) return impl_->f1(x, y);
        else if constexpr (lvl == 2) return impl_->f2(x, y);
        else return impl_->f3(x, y);
      } else if constexpr (std::is_same_v<B, long double>) {
        if constexpr (lvl == 0) return impl_->e0(x, y);
        else if constexpr (lvl == 1) return impl_->e1(x, y);
        else if constexpr (lvl == 2) return impl_->e2(x, y);
        else return impl_->e3(x, y);
      }
#if defined(LHDEFORM_HAVE_QUADMATH)
      else if constexpr (std::is_same_v<T, Quad>) {
        if (!impl_->q0) throw DomainError("field has no quad-precision evaluator");
        return impl_->q0(x, y);
      }
#endif
      else {
        throw DomainError("unsupported evaluation type");
      }
    }
  }

  template <class T>
  T eval(const Vec2<T>& p) const { return eval(p.x, p.y); }

  double operator()(const Point2& p) const { return eval(p.x, p.y); }
  double operator()(double x, double y) const { return eval(x, y); }

  /// Highest jet level this field can be evaluated at.
  int level() const { return impl_->level; }
  const Chart& chart() const { return impl_->chart; }

 private:
  struct Impl {
    int level = kMaxLevel;
    Chart chart;
    std::function<Jet0(const Jet0&, const Jet0&)> f0;
    std::function<Jet1(const Jet1&, const Jet1&)> f1;
    std::function<Jet2(const Jet2&, const Jet2&)> f2;
    std::function<Jet3(const Jet3&, const Jet3&)> f3;
    std::function<ExtJet0(const ExtJet0&, const ExtJet0&)> e0;
    std::function<ExtJet1(const ExtJet1&, const ExtJet1&)> e1;
    std::function<ExtJet2(const ExtJet2&, const ExtJet2&)> e2;
    std::function<ExtJet3(const ExtJet3&, const ExtJet3&)> e3;
#if defined(LHDEFORM_HAVE_QUADMATH)
    std::function<Quad(const Quad&, const Quad&)> q0;
#endif
  };

  explicit ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const Impl> impl_;
};

/// Partial derivative of `f` along axis 0 (x) or 1 (y), evaluated at jet
/// type T by seeding one level deeper.
template <class T>
T partial(const ScalarField& f, int axis, const T& x, const T& y) {
  using D = Dual<T>;
  const D dx(x, axis == 0 ? T(1.0) : T(0.0));
  const D dy(y, axis == 1 ? T(1.0) : T(0.0));
  return f.eval(dx, dy).d;
}

/// Field of the partial derivative along `axis`.
inline ScalarField partial_field(const ScalarField& f, int axis) {
  return ScalarField::derived(f.level() - 1, f.chart(),
                              [f, axis](const auto& x, const auto& y) { return partial(f, axis, x, y); });
}

struct Diff2Result {
  double value = 0.0;
  Point2 gradient;
  Mat2 hessian{};
};

/// Value and exact gradient at `p` via one level of dual propagation.
inline std::pair<double, Point2> value_and_gradient(const ScalarField& f, const Point2& p,
                                                    const Tolerances& tol = default_tolerances()) {
  f.chart().require(p, tol.domain_margin);
  const Jet1 gx = f.eval(Jet1(p.x, 1.0), Jet1(p.y, 0.0));
  const Jet1 gy = f.eval(Jet1(p.x, 0.0), Jet1(p.y, 1.0));
  return {gx.v, {gx.d, gy.d}};
}

/// Value, gradient and Hessian at `p` from nested first-order duals. The
/// two mixed partials are computed independently.
inline Diff2Result diff2(const ScalarField& f, const Point2& p, const Tolerances& tol = default_tolerances()) {
  f.chart().require(p, tol.domain_margin);
  auto seed = [&](int a, int b) {
    const Jet1 one(1.0), zero(0.0);
    const Jet2 x(Jet1(p.x, a == 0 ? 1.0 : 0.0), b == 0 ? one : zero);
    const Jet2 y(Jet1(p.y, a == 1 ? 1.0 : 0.0), b == 1 ? one : zero);
    return f.eval(x, y);
  };
  Diff2Result r;
  const Jet2 xx = seed(0, 0);
  const Jet2 xy = seed(0, 1);
  const Jet2 yx = seed(1, 0);
  const Jet2 yy = seed(1, 1);
  r.value = xx.v.v;
  r.gradient = {xx.v.d, yy.v.d};
  r.hessian = {{{xx.d.d, xy.d.d}, {yx.d.d, yy.d.d}}};
  return r;
}

}  // namespace lhdeform
