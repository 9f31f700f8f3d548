#include "wshart/double_double.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace wshart {

namespace {

DoubleDouble square(const DoubleDouble& a) {
  double p, e;
  dd_detail::two_prod(a.hi(), a.hi(), p, e);
  e += 2.0 * a.hi() * a.lo();
  dd_detail::quick_two_sum(p, e, p, e);
  return {p, e};
}

}  // namespace

DoubleDouble sqrt(const DoubleDouble& a) {
  if (a.hi() == 0.0) return {0.0, 0.0};
  if (a.hi() < 0.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  const double x = 1.0 / std::sqrt(a.hi());
  const double ax = a.hi() * x;
  const DoubleDouble r = a - square(DoubleDouble(ax));
  double s, e;
  dd_detail::two_sum(ax, r.hi() * x * 0.5, s, e);
  return {s, e};
}

DoubleDouble exp(const DoubleDouble& a) {
  if (a.hi() > 709.0) return {std::numeric_limits<double>::infinity(), 0.0};
  if (a.hi() < -745.0) return {0.0, 0.0};
  if (a.hi() == 0.0 && a.lo() == 0.0) return {1.0, 0.0};

  const double k = std::nearbyint(a.hi() / dd_constants::ln2.hi());
  DoubleDouble r = a - dd_constants::ln2 * k;
  r = ldexp(r, -10);

  // expm1(r) by Taylor series; |r| < 3.4e-4 so 12 terms reach 1e-40.
  DoubleDouble term = r;
  DoubleDouble p = r;
  for (int i = 2; i <= 14; ++i) {
    term = term * r / static_cast<double>(i);
    p += term;
    if (std::abs(term.hi()) < 1e-36 * std::abs(p.hi())) break;
  }
  // e^{2r} - 1 = p (2 + p), applied once per halving.
  for (int i = 0; i < 10; ++i) p = p * (p + 2.0);
  return ldexp(p + 1.0, static_cast<int>(k));
}

DoubleDouble log(const DoubleDouble& a) {
  if (a.hi() <= 0.0) {
    return {a.hi() == 0.0 ? -std::numeric_limits<double>::infinity()
                          : std::numeric_limits<double>::quiet_NaN(),
            0.0};
  }
  if (std::isinf(a.hi())) return a;
  // One Newton step on exp(y) = a doubles the 53-bit starting guess.
  DoubleDouble y(std::log(a.hi()));
  y = y + a * exp(-y) - 1.0;
  return y;
}

DoubleDouble pow(const DoubleDouble& base, const DoubleDouble& exponent) {
  if (base.hi() == 0.0) return exponent.hi() == 0.0 ? DoubleDouble(1.0) : DoubleDouble(0.0);
  return exp(exponent * log(base));
}

std::string to_string(const DoubleDouble& x, int digits) {
  if (digits < 1) digits = 1;
  if (digits > 32) digits = 32;
  if (!std::isfinite(x.hi())) return std::to_string(x.hi());
  if (x.hi() == 0.0) return "0";

  std::string out;
  DoubleDouble v = x;
  if (v.hi() < 0.0) {
    out.push_back('-');
    v = -v;
  }
  int e10 = static_cast<int>(std::floor(std::log10(v.hi())));
  // Scale into [1, 10) using exact-ish powers of ten built by squaring.
  auto pow10 = [](int n) {
    DoubleDouble r(1.0), b(10.0);
    unsigned m = static_cast<unsigned>(n < 0 ? -n : n);
    while (m) {
      if (m & 1u) r *= b;
      b = square(b);
      m >>= 1u;
    }
    return n < 0 ? DoubleDouble(1.0) / r : r;
  };
  v = v / pow10(e10);
  if (v.hi() >= 10.0) {
    v = v / 10.0;
    ++e10;
  } else if (v.hi() < 1.0) {
    v = v * 10.0;
    --e10;
  }

  std::string mant;
  for (int i = 0; i < digits + 1; ++i) {
    int d = static_cast<int>(std::floor(v.hi()));
    if (d < 0) d = 0;
    if (d > 9) d = 9;
    mant.push_back(static_cast<char>('0' + d));
    v = (v - static_cast<double>(d)) * 10.0;
  }
  // Round half up on the guard digit, propagating carries.
  if (mant.back() >= '5') {
    int i = digits - 1;
    while (i >= 0 && mant[i] == '9') mant[i--] = '0';
    if (i >= 0) {
      ++mant[i];
    } else {
      mant.insert(mant.begin(), '1');
      ++e10;
    }
  }
  mant.resize(digits);

  out.push_back(mant[0]);
  if (digits > 1) {
    out.push_back('.');
    out.append(mant, 1, std::string::npos);
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "e%+03d", e10);
  out += buf;
  return out;
}

std::ostream& operator<<(std::ostream& os, const DoubleDouble& x) {
  const auto prec = os.precision();
  return os << to_string(x, prec > 0 ? static_cast<int>(prec) : 32);
}

}  // namespace wshart
