#pragma once

#include <string>
#include <vector>

#include "wshart/chebyshev.hpp"
#include "wshart/precision.hpp"

namespace wshart {

/// Adaptive embedded Runge-Kutta (Fehlberg 7(8)) settings and the uniform
/// reporting grid.
struct ODESolverConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  int grid_points = 2001;
  /// Upper bound on the launch point of the hard-edge solve; the actual launch
  /// is min(x0, 1e-14^{1/(a+1)}) so the truncated series error stays below
  /// 1e-14 relative.
  double x0 = 1e-6;
};

struct P3Point {
  double f = 0.0;
  double f_prime = 0.0;
  double f_doubleprime = 0.0;
  double log_F = 0.0;  // integral of f(u)/u from 0
};

/// Hard-edge function f(x) of the Painleve III problem on a uniform grid
/// over [0, x_max].
struct PIIISolution {
  double a = 0.0;
  double x_max = 0.0;
  double x_launch = 0.0;
  ODESolverConfig config;
  std::vector<double> grid;
  std::vector<double> f;
  std::vector<double> f_prime;
  std::vector<double> f_doubleprime;  // -inf at x = 0 when a < 1
  std::vector<double> log_F;

  /// Re-integrates from the nearest grid node; throws GridError outside [0, x_max].
  P3Point at(double x) const;
};

/// Small-x series of f: f = -sum_k d_k x^{a+1+k} with d_0 = 1/(Γ(a+1)Γ(a+2)).
/// Exact solution of the part of the equation quadratic in f.
P3Point p3_series(double a, double x);

PIIISolution solve_p3(double a, double x_max, const ODESolverConfig& config = {});

/// (x f'')^2 + 4 f'(1+f')(x f' - f) - (a f')^2, normalised by (a f')^2 + 1e-30.
double p3_residual(double a, double x, double f, double fp, double fpp);

/// -x det[I_{j-k+2}(2 sqrt x)] / det[I_{j-k}(2 sqrt x)], j,k = 1..a.
double bessel_det_f(int a, double x, const PrecisionContext& ctx = PrecisionContext::standard());

/// F_inf(x) = exp(int_0^x f(u)/u du).
double limiting_cdf(const PIIISolution& p3, double x);

/// Integral of f(u)/u by Gauss-Legendre quadrature of the Bessel determinant
/// (integer a only); independent of the ODE solve.
double limiting_cdf_bessel(int a, double x);
/// Same on a nondecreasing grid, accumulating the integral between nodes.
std::vector<double> limiting_cdf_bessel(int a, const std::vector<double>& xs);

struct CorrectedCdf {
  double F_inf = 0.0;
  double additive = 0.0;     // F_inf + (a/2N) f F_inf
  double exponential = 0.0;  // exp(int f/u + (a/2N) f)
};

CorrectedCdf corrected_cdf(const PIIISolution& p3, int N, double x);

struct PIIConfig {
  double x_min = -8.0;
  double x_max = 10.0;
  /// Collocation runs on [x_min - left_pad, x_max]; the left boundary uses the
  /// large-negative-x asymptotic series of q.
  double left_pad = 4.0;
  int nodes = 256;
  int grid_points = 2001;
  double newton_tol = 1e-13;
  int max_newton_iter = 60;
};

struct H1Config {
  double amplitude = 1.0;
  double rtol = 1e-12;
  double atol = 1e-14;  // scaled by |seed| so results are linear in the amplitude
};

struct PIISolution {
  PIIConfig config;
  ChebyshevSeries q_series;
  ChebyshevSeries qp_series;         // Ai'(x_max) - int_x^{x_max} q''
  ChebyshevSeries h0_series;         // closed form q'^2 - q^4 - x q^2
  ChebyshevSeries h0_tail_integral;  // int_x^{x_max} of h0_series
  ChebyshevSeries q2_tail_integral;  // int_x^{x_max} q^2 (quadrature route)
  int newton_iterations = 0;
  double newton_residual = 0.0;
  /// q' is integrated from q'(x_max) = Ai'(x_max); this is the max gap to the
  /// spectral derivative of q over [x_min, x_max].
  double qprime_route_mismatch = 0.0;

  std::vector<double> grid;
  std::vector<double> q;
  std::vector<double> q_prime;
  std::vector<double> h0_tilde;
  std::vector<double> h1_tilde;       // filled by solve_h1_correction
  std::vector<double> h1_tilde_prime;
  std::vector<double> h1_integral;    // int_x^inf h1
  double h1_amplitude = 0.0;
  H1Config h1_config;
  std::string h1_amplitude_convention;
  std::vector<std::string> warnings;

  double q_at(double x) const;
  double q_prime_at(double x) const;
};

PIISolution solve_p2_hastings_mcleod(const PIIConfig& config = {});

/// Closed form q'^2 - q^4 - x q^2 (equal to int_x^inf q^2).
double h0_tilde(const PIISolution& p2, double x);
/// int_x^inf q^2 by spectral quadrature plus the Airy tail beyond x_max.
double h0_tilde_quadrature(const PIISolution& p2, double x);

/// Tracy-Widom F_2(s) = exp(-int_s^inf h0).
double tw2_cdf(const PIISolution& p2, double s);
/// F_2(s) = exp(-int_s^inf (x - s) q^2) by adaptive Gauss-Kronrod quadrature.
double tw2_cdf_quadrature(const PIISolution& p2, double s);

/// Solves the linear correction ODE backward from x_max with tail seed
/// A x^{-1/2} exp(-(4/3) x^{3/2}); fills h1_tilde* fields of p2.
void solve_h1_correction(PIISolution& p2, const H1Config& config = {});

struct H1Point {
  double h1 = 0.0;
  double h1_prime = 0.0;
  double integral = 0.0;  // int_x^inf h1
};
H1Point h1_at(const PIISolution& p2, double x);

/// Coefficient form of the h1 equation at x: c2 h1'' + c1 h1' + c0 h1 = 0.
struct H1Coefficients {
  double c0, c1, c2;
};
H1Coefficients h1_coefficients(const PIISolution& p2, double x);

/// Seed A x^{-1/2} exp(-(4/3) x^{3/2}).
double h1_tail_seed(double A, double x);

/// sigma-form Painleve V residual
/// (tH'')^2 - 4H'^2(H - N(N+a) - tH') - ((2N+a-t)H' + H)^2,
/// divided by its largest term (returns 0 when every term vanishes).
double p5_residual(double H, double Hp, double Hpp, double t, int N, double a);

}  // namespace wshart
