#pragma once

#include <optional>
#include <string>

#include "wshart/painleve.hpp"

namespace wshart {

/// Marchenko-Pastur density with aspect ratio c = N/M in (0, 1].
double mp_density(double x, double c);

/// Soft-edge constants for a = ratio * N.
struct SoftEdgeParams {
  double ratio = 0.0;
  double x_minus = 0.0;
  double x_plus = 0.0;
  double m = 0.0;
  double c() const { return 1.0 / (1.0 + ratio); }
};

SoftEdgeParams soft_edge_params(double ratio);

/// x = m (N x_- - t) / N^{1/3}.
double soft_edge_coordinate(int N, const SoftEdgeParams& p, double t);
/// t = N x_- - x N^{1/3} / m.
double soft_edge_location(int N, const SoftEdgeParams& p, double x);

struct SoftEdgeCdf {
  double x = 0.0;
  double leading = 0.0;  // F_2(x)
  /// exp(-int_x^inf [h0 + A N^{-1/3} h1]); present only when A is supplied.
  std::optional<double> corrected;
  std::string label;
};

/// Soft-edge survival Prob(lambda_min >= t). The corrected form needs
/// solve_h1_correction on `p2` and is labelled as a conjectured amplitude.
SoftEdgeCdf soft_edge_cdf(int N, const SoftEdgeParams& params, double t, const PIISolution& p2,
                          std::optional<double> A = std::nullopt);

struct HardEdgeExpansion {
  double r0 = 0.0, s1 = 0.0, r1 = 0.0, s2 = 0.0;
  double R_N_approx = 0.0, S_N_approx = 0.0, zeta_N_approx = 0.0;
};

/// Double-scaling coefficients of R_N, S_N, zeta_N at t = x/N.
HardEdgeExpansion hard_edge_expansion(const PIIISolution& p3, double a, int N, double x);

enum class Regime { hard_edge, soft_edge };

/// a <= 2 N^{1/3}: hard edge; a >= 8 N^{1/3}: soft edge; otherwise the
/// crossover regime, which is rejected with DomainError.
Regime classify_regime(int N, double a);

std::string to_string(Regime r);

}  // namespace wshart
