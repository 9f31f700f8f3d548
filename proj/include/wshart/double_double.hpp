#pragma once

// Unevaluated sum of two doubles (hi + lo, |lo| <= ulp(hi)/2), giving about
// 31 significant decimal digits. Algorithms follow Dekker, Knuth and the QD
// library of Hida, Li and Bailey. Requires strict IEEE evaluation: do not
// build with -ffast-math or FP contraction.

#include <cmath>
#include <compare>
#include <iosfwd>
#include <limits>
#include <string>
#include <type_traits>

namespace wshart {

namespace dd_detail {

inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

inline void quick_two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  e = b - (s - a);
}

inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

}  // namespace dd_detail

class DoubleDouble {
 public:
  constexpr DoubleDouble() = default;
  constexpr DoubleDouble(double hi) : hi_(hi) {}  // NOLINT: implicit by design of the numeric tower
  constexpr DoubleDouble(double hi, double lo) : hi_(hi), lo_(lo) {}
  DoubleDouble(int v) : hi_(static_cast<double>(v)) {}  // NOLINT
  DoubleDouble(long v) { *this = from_integer(v); }     // NOLINT
  DoubleDouble(long long v) { *this = from_integer(v); }  // NOLINT

  constexpr double hi() const { return hi_; }
  constexpr double lo() const { return lo_; }
  constexpr double to_double() const { return hi_ + lo_; }
  explicit constexpr operator double() const { return hi_ + lo_; }

  static constexpr double epsilon() { return 4.93038065763132e-32; }  // 2^-104

  DoubleDouble operator-() const { return {-hi_, -lo_}; }

  friend DoubleDouble operator+(const DoubleDouble& a, const DoubleDouble& b) {
    double s, e, t, f;
    dd_detail::two_sum(a.hi_, b.hi_, s, e);
    dd_detail::two_sum(a.lo_, b.lo_, t, f);
    e += t;
    dd_detail::quick_two_sum(s, e, s, e);
    e += f;
    dd_detail::quick_two_sum(s, e, s, e);
    return {s, e};
  }
  friend DoubleDouble operator+(const DoubleDouble& a, double b) {
    double s, e;
    dd_detail::two_sum(a.hi_, b, s, e);
    e += a.lo_;
    dd_detail::quick_two_sum(s, e, s, e);
    return {s, e};
  }
  friend DoubleDouble operator+(double a, const DoubleDouble& b) { return b + a; }

  friend DoubleDouble operator-(const DoubleDouble& a, const DoubleDouble& b) { return a + (-b); }
  friend DoubleDouble operator-(const DoubleDouble& a, double b) { return a + (-b); }
  friend DoubleDouble operator-(double a, const DoubleDouble& b) { return (-b) + a; }

  friend DoubleDouble operator*(const DoubleDouble& a, const DoubleDouble& b) {
    double p, e;
    dd_detail::two_prod(a.hi_, b.hi_, p, e);
    e += a.hi_ * b.lo_ + a.lo_ * b.hi_;
    dd_detail::quick_two_sum(p, e, p, e);
    return {p, e};
  }
  friend DoubleDouble operator*(const DoubleDouble& a, double b) {
    double p, e;
    dd_detail::two_prod(a.hi_, b, p, e);
    e += a.lo_ * b;
    dd_detail::quick_two_sum(p, e, p, e);
    return {p, e};
  }
  friend DoubleDouble operator*(double a, const DoubleDouble& b) { return b * a; }

  friend DoubleDouble operator/(const DoubleDouble& a, const DoubleDouble& b) {
    const double q1 = a.hi_ / b.hi_;
    DoubleDouble r = a - b * q1;
    const double q2 = r.hi_ / b.hi_;
    r = r - b * q2;
    const double q3 = r.hi_ / b.hi_;
    double s, e;
    dd_detail::quick_two_sum(q1, q2, s, e);
    return DoubleDouble{s, e} + q3;
  }
  friend DoubleDouble operator/(const DoubleDouble& a, double b) { return a / DoubleDouble(b); }
  friend DoubleDouble operator/(double a, const DoubleDouble& b) { return DoubleDouble(a) / b; }

  DoubleDouble& operator+=(const DoubleDouble& o) { return *this = *this + o; }
  DoubleDouble& operator-=(const DoubleDouble& o) { return *this = *this - o; }
  DoubleDouble& operator*=(const DoubleDouble& o) { return *this = *this * o; }
  DoubleDouble& operator/=(const DoubleDouble& o) { return *this = *this / o; }

  friend bool operator==(const DoubleDouble& a, const DoubleDouble& b) {
    return a.hi_ == b.hi_ && a.lo_ == b.lo_;
  }
  friend std::partial_ordering operator<=>(const DoubleDouble& a, const DoubleDouble& b) {
    if (auto c = a.hi_ <=> b.hi_; c != 0) return c;
    return a.lo_ <=> b.lo_;
  }
  friend bool operator==(const DoubleDouble& a, double b) { return a == DoubleDouble(b); }
  friend std::partial_ordering operator<=>(const DoubleDouble& a, double b) {
    return a <=> DoubleDouble(b);
  }

 private:
  template <class I>
  static DoubleDouble from_integer(I v) {
    const double hi = static_cast<double>(v);
    const double lo = static_cast<double>(v - static_cast<I>(hi));
    return {hi, lo};
  }

  double hi_ = 0.0;
  double lo_ = 0.0;
};

using Extended = DoubleDouble;

DoubleDouble exp(const DoubleDouble& x);
DoubleDouble log(const DoubleDouble& x);
DoubleDouble sqrt(const DoubleDouble& x);
DoubleDouble pow(const DoubleDouble& base, const DoubleDouble& exponent);

inline DoubleDouble abs(const DoubleDouble& x) { return x.hi() < 0.0 ? -x : x; }
inline DoubleDouble fabs(const DoubleDouble& x) { return abs(x); }
inline DoubleDouble ldexp(const DoubleDouble& x, int e) {
  return {std::ldexp(x.hi(), e), std::ldexp(x.lo(), e)};
}
inline bool isfinite(const DoubleDouble& x) { return std::isfinite(x.hi()); }
inline bool isnan(const DoubleDouble& x) { return std::isnan(x.hi()); }

/// Decimal rendering with `digits` significant digits (up to 32).
std::string to_string(const DoubleDouble& x, int digits = 32);
std::ostream& operator<<(std::ostream& os, const DoubleDouble& x);

inline double to_double(double x) { return x; }
inline double to_double(const DoubleDouble& x) { return x.to_double(); }

namespace dd_constants {
inline constexpr DoubleDouble pi{3.141592653589793, 1.2246467991473532e-16};
inline constexpr DoubleDouble ln2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr DoubleDouble half_log_two_pi{0.9189385332046728, -3.8782941580672414e-17};
inline constexpr DoubleDouble inv_sqrt_pi{0.5641895835477563, 7.66772980658294e-18};
}  // namespace dd_constants

/// Unit roundoff of the arithmetic type used by the templated kernels.
template <class T>
constexpr double unit_roundoff() {
  if constexpr (std::is_same_v<T, DoubleDouble>) {
    return DoubleDouble::epsilon();
  } else {
    return std::numeric_limits<T>::epsilon();
  }
}

/// Overload set for templated kernels: resolves to std:: for double and to
/// the double-double routines otherwise, without implicit widening.
namespace math {
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double abs(double x) { return std::fabs(x); }
inline double pow(double b, double e) { return std::pow(b, e); }
inline bool isfinite(double x) { return std::isfinite(x); }
inline DoubleDouble exp(const DoubleDouble& x) { return wshart::exp(x); }
inline DoubleDouble log(const DoubleDouble& x) { return wshart::log(x); }
inline DoubleDouble sqrt(const DoubleDouble& x) { return wshart::sqrt(x); }
inline DoubleDouble abs(const DoubleDouble& x) { return wshart::abs(x); }
inline DoubleDouble pow(const DoubleDouble& b, const DoubleDouble& e) { return wshart::pow(b, e); }
inline bool isfinite(const DoubleDouble& x) { return wshart::isfinite(x); }
}  // namespace math

}  // namespace wshart
