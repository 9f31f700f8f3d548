#pragma once

// Partial-pivoted LU on a small dense row-major matrix of any field type
// supporting + - * / and to_double(). Used for Hankel and Bessel determinants
// where the entries are double-double and Eigen's scalar plumbing is overkill.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "wshart/double_double.hpp"

namespace wshart {

template <class T>
struct LUResult {
  std::vector<T> lu;  // packed L (unit diagonal) and U, row-major n x n
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
  std::size_t n = 0;

  T determinant() const {
    T d(static_cast<double>(sign));
    for (std::size_t i = 0; i < n; ++i) d = d * lu[i * n + i];
    return d;
  }

  /// Solves A x = b in place.
  void solve(std::vector<T>& b) const {
    std::vector<T> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      T s = b[perm[i]];
      for (std::size_t j = 0; j < i; ++j) s = s - lu[i * n + j] * y[j];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      T s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s = s - lu[ii * n + j] * b[j];
      b[ii] = s / lu[ii * n + ii];
    }
  }
};

template <class T>
LUResult<T> lu_factor(std::vector<T> a, std::size_t n) {
  LUResult<T> r;
  r.n = n;
  r.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(to_double(a[k * n + k]));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(to_double(a[i * n + k]));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best == 0.0) {
      r.singular = true;
      continue;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(r.perm[k], r.perm[piv]);
      r.sign = -r.sign;
    }
    const T inv = T(1.0) / a[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const T m = a[i * n + k] * inv;
      a[i * n + k] = m;
      for (std::size_t j = k + 1; j < n; ++j) a[i * n + j] = a[i * n + j] - m * a[k * n + j];
    }
  }
  r.lu = std::move(a);
  return r;
}

/// 1-norm condition number estimate, exact via the explicit inverse (n is small).
template <class T>
double condition_number_1(const std::vector<T>& a, const LUResult<T>& f) {
  const std::size_t n = f.n;
  if (f.singular) return INFINITY;
  double norm_a = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(to_double(a[i * n + j]));
    norm_a = std::max(norm_a, s);
  }
  double norm_inv = 0.0;
  std::vector<T> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = T(i == j ? 1.0 : 0.0);
    f.solve(col);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(to_double(col[i]));
    norm_inv = std::max(norm_inv, s);
  }
  return norm_a * norm_inv;
}

}  // namespace wshart
