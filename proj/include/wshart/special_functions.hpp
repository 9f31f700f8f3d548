#pragma once

#include "wshart/double_double.hpp"
#include "wshart/precision.hpp"

namespace wshart {

// Kernels templated on the arithmetic type (double or DoubleDouble). `tol`
// is the relative series-truncation tolerance; it is clamped below by the
// unit roundoff of T.
namespace sf {

template <class T>
T log_gamma(const T& x);

/// log Γ(nu, x), finite for nu up to several hundred.
template <class T>
T log_upper_gamma(const T& nu, const T& x, double tol);

/// log Q(nu, x) = log(Γ(nu, x) / Γ(nu)).
template <class T>
T log_regularized_upper_gamma(const T& nu, const T& x, double tol);

template <class T>
T bessel_i(int n, const T& x, double tol);

/// Ai and Ai' together. Maclaurin series (summed in double-double) for
/// x <= 8, asymptotic expansion on (8, 20].
template <class T>
void airy(const T& x, T& ai, T& ai_prime);

}  // namespace sf

// Context-driven entry points. Extended mode evaluates in double-double and
// rounds the result.

double log_gamma(double x, const PrecisionContext& ctx = PrecisionContext::standard());
double upper_incomplete_gamma(double nu, double x,
                              const PrecisionContext& ctx = PrecisionContext::standard());
double log_upper_incomplete_gamma(double nu, double x,
                                  const PrecisionContext& ctx = PrecisionContext::standard());
double bessel_i(int n, double x, const PrecisionContext& ctx = PrecisionContext::standard());
double airy_ai(double x, const PrecisionContext& ctx = PrecisionContext::standard());
double airy_ai_prime(double x, const PrecisionContext& ctx = PrecisionContext::standard());

inline constexpr double kAiryMin = -10.0;
inline constexpr double kAiryMax = 20.0;
inline constexpr double kAirySwitch = 8.0;

}  // namespace wshart
