#pragma once

#include <vector>

namespace wshart {

/// Chebyshev expansion sum_k c_k T_k(xi), xi = (2x - lo - hi)/(hi - lo), on [lo, hi].
class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;
  ChebyshevSeries(double lo, double hi, std::vector<double> coeffs);

  /// Interpolant through values at the Chebyshev-Lobatto nodes
  /// x_j = map(cos(pi j / n)), j = 0..n (so x_0 = hi).
  static ChebyshevSeries from_lobatto_values(double lo, double hi, const std::vector<double>& v);
  static std::vector<double> lobatto_nodes(double lo, double hi, int n);

  double operator()(double x) const;
  ChebyshevSeries derivative() const;
  /// Antiderivative vanishing at `lo`.
  ChebyshevSeries integral() const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& coeffs() const { return c_; }

 private:
  double lo_ = -1.0;
  double hi_ = 1.0;
  std::vector<double> c_;
};

}  // namespace wshart
