#include "wshart/chebyshev.hpp"

#include <cmath>
#include <stdexcept>

namespace wshart {

ChebyshevSeries::ChebyshevSeries(double lo, double hi, std::vector<double> coeffs)
    : lo_(lo), hi_(hi), c_(std::move(coeffs)) {
  if (!(hi > lo)) throw std::invalid_argument("ChebyshevSeries: empty interval");
}

std::vector<double> ChebyshevSeries::lobatto_nodes(double lo, double hi, int n) {
  std::vector<double> x(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    x[static_cast<std::size_t>(j)] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(M_PI * j / n);
  }
  return x;
}

ChebyshevSeries ChebyshevSeries::from_lobatto_values(double lo, double hi,
                                                     const std::vector<double>& v) {
  const int n = static_cast<int>(v.size()) - 1;
  if (n < 1) throw std::invalid_argument("ChebyshevSeries: need at least two nodes");
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  // Discrete cosine transform (type I); O(n^2) is fine for n of a few hundred.
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double w = (j == 0 || j == n) ? 0.5 : 1.0;
      s += w * v[static_cast<std::size_t>(j)] * std::cos(M_PI * k * j / n);
    }
    c[static_cast<std::size_t>(k)] = s * 2.0 / n;
  }
  c[0] *= 0.5;
  c[static_cast<std::size_t>(n)] *= 0.5;
  return ChebyshevSeries(lo, hi, std::move(c));
}

double ChebyshevSeries::operator()(double x) const {
  const double xi = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c_.size(); k-- > 1;) {
    const double b0 = 2.0 * xi * b1 - b2 + c_[k];
    b2 = b1;
    b1 = b0;
  }
  return xi * b1 - b2 + (c_.empty() ? 0.0 : c_[0]);
}

ChebyshevSeries ChebyshevSeries::derivative() const {
  const std::size_t n = c_.size();
  if (n <= 1) return ChebyshevSeries(lo_, hi_, {0.0});
  std::vector<double> d(n, 0.0);
  // c'_{k-1} = c'_{k+1} + 2k c_k
  for (std::size_t k = n - 1; k >= 1; --k) {
    d[k - 1] = (k + 1 < n ? d[k + 1] : 0.0) + 2.0 * static_cast<double>(k) * c_[k];
  }
  d[0] *= 0.5;
  const double scale = 2.0 / (hi_ - lo_);
  for (auto& v : d) v *= scale;
  d.pop_back();
  return ChebyshevSeries(lo_, hi_, std::move(d));
}

ChebyshevSeries ChebyshevSeries::integral() const {
  const std::size_t n = c_.size();
  std::vector<double> I(n + 1, 0.0);
  const double scale = 0.5 * (hi_ - lo_);
  for (std::size_t k = 1; k <= n; ++k) {
    const double cm = (k == 1 ? 2.0 * c_[0] : c_[k - 1]);
    const double cp = (k + 1 < n ? c_[k + 1] : 0.0);
    I[k] = scale * (cm - cp) / (2.0 * static_cast<double>(k));
  }
  ChebyshevSeries r(lo_, hi_, I);
  const double at_lo = r(lo_);
  r.c_[0] = -at_lo;
  return r;
}

}  // namespace wshart
