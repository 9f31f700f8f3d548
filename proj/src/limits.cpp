#include "wshart/limits.hpp"

#include <cmath>
#include <string>

#include "wshart/errors.hpp"

namespace wshart {

double mp_density(double x, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("mp_density: c must lie in (0, 1]");
  const double r = 1.0 / std::sqrt(c);
  const double xm = (r - 1.0) * (r - 1.0), xp = (r + 1.0) * (r + 1.0);
  if (!(x > xm && x < xp) || x <= 0.0) return 0.0;
  return std::sqrt((x - xm) * (xp - x)) / (2.0 * M_PI * x);
}

SoftEdgeParams soft_edge_params(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw DomainError("soft_edge_params: ratio must be > 0 (ratio -> 0 is the hard edge)");
  }
  SoftEdgeParams p;
  p.ratio = ratio;
  const double s = std::sqrt(1.0 + ratio);
  p.x_minus = (s - 1.0) * (s - 1.0);
  p.x_plus = (s + 1.0) * (s + 1.0);
  p.m = std::pow(1.0 + ratio, 1.0 / 6.0) / std::pow(s - 1.0, 4.0 / 3.0);
  return p;
}

double soft_edge_coordinate(int N, const SoftEdgeParams& p, double t) {
  if (N < 1) throw DomainError("soft_edge_coordinate: N must be >= 1");
  return p.m * (N * p.x_minus - t) / std::cbrt(static_cast<double>(N));
}

double soft_edge_location(int N, const SoftEdgeParams& p, double x) {
  if (N < 1) throw DomainError("soft_edge_location: N must be >= 1");
  return N * p.x_minus - x * std::cbrt(static_cast<double>(N)) / p.m;
}

SoftEdgeCdf soft_edge_cdf(int N, const SoftEdgeParams& params, double t, const PIISolution& p2,
                          std::optional<double> A) {
  SoftEdgeCdf r;
  r.x = soft_edge_coordinate(N, params, t);
  r.leading = tw2_cdf(p2, r.x);
  r.label = "leading order (Tracy-Widom F2)";
  if (A) {
    double J = 0.0;
    if (*A != 0.0) {
      if (p2.h1_tilde.empty() || p2.h1_amplitude == 0.0) {
        throw DomainError("soft_edge_cdf: run solve_h1_correction before requesting A");
      }
      J = h1_at(p2, r.x).integral / p2.h1_amplitude;
    }
    r.corrected = r.leading * std::exp(-(*A) * J / std::cbrt(static_cast<double>(N)));
    r.label = "corrected with conjectured amplitude A = " + std::to_string(*A);
  }
  return r;
}

HardEdgeExpansion hard_edge_expansion(const PIIISolution& p3, double a, int N, double x) {
  if (N < 1) throw DomainError("hard_edge_expansion: N must be >= 1");
  const P3Point p = p3.at(x);
  HardEdgeExpansion e;
  e.r0 = x * p.f_prime - p.f;
  e.s1 = -x * p.f_prime;
  const double x2fpp = x == 0.0 ? 0.0 : x * x * p.f_doubleprime;
  e.r1 = 0.5 * a * x2fpp;
  e.s2 = -0.5 * (a + 1.0) * x2fpp;
  const double n = N;
  e.R_N_approx = n * (n + a) + e.r0 + e.r1 / n;
  e.S_N_approx = 2.0 * n + a + 1.0 + e.s1 / n + e.s2 / (n * n);
  e.zeta_N_approx = -n * (n + a) + p.f + a / (2.0 * n) * x * p.f_prime;
  return e;
}

Regime classify_regime(int N, double a) {
  if (N < 1) throw DomainError("classify_regime: N must be >= 1");
  if (!(a >= 0.0)) throw DomainError("classify_regime: a must be >= 0");
  const double n13 = std::cbrt(static_cast<double>(N));
  if (a <= 2.0 * n13) return Regime::hard_edge;
  if (a >= 8.0 * n13) return Regime::soft_edge;
  throw DomainError("a = " + std::to_string(a) + " at N = " + std::to_string(N) +
                    " lies in the hard/soft crossover (a ~ N^{1/3}), which is not supported");
}

std::string to_string(Regime r) { return r == Regime::hard_edge ? "hard-edge" : "soft-edge"; }

}  // namespace wshart
