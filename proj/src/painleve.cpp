#include "wshart/painleve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "wshart/dense_lu.hpp"
#include "wshart/errors.hpp"
#include "wshart/special_functions.hpp"

namespace wshart {

namespace odeint = boost::numeric::odeint;

namespace {

using State3 = std::array<double, 3>;
using Stepper = odeint::runge_kutta_fehlberg78<State3>;

constexpr double kBranchTol = 1e-8;

// x f'' for the branch through the small-x series (sign -1); the radicand is
// clamped at zero, returned separately so callers can detect branch loss.
double p3_xfpp(double a, double x, double f, double p, double& radicand, double& scale) {
  const double ap = a * p;
  const double q = 4.0 * p * (1.0 + p) * (x * p - f);
  radicand = ap * ap - q;
  scale = ap * ap + std::fabs(q);
  return -std::sqrt(std::max(radicand, 0.0));
}

struct P3System {
  double a;
  void operator()(const State3& y, State3& dy, double s) const {
    const double x = std::exp(s);
    double rad, sc;
    dy[0] = x * y[1];
    dy[1] = p3_xfpp(a, x, y[0], y[1], rad, sc);
    dy[2] = y[0];
  }
};

double launch_point(double a, double cap) {
  return std::min(cap, std::pow(1e-14, 1.0 / (a + 1.0)));
}

double effective_atol(const PIIISolution& s) {
  const double f0 = std::fabs(p3_series(s.a, s.x_launch).f);
  return std::min(s.config.atol, s.config.rtol * f0);
}

void integrate_p3(double a, State3& y, double x_from, double x_to, double atol, double rtol) {
  try {
    auto stepper = odeint::make_controlled<Stepper>(atol, rtol);
    const double s0 = std::log(x_from), s1 = std::log(x_to);
    odeint::integrate_adaptive(stepper, P3System{a}, y, s0, s1, (s1 - s0) / 16.0);
  } catch (const odeint::step_adjustment_error& e) {
    throw ConvergenceError(std::string("hard-edge ODE step-size underflow: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw ConvergenceError(std::string("hard-edge ODE made no progress: ") + e.what());
  }
}

P3Point finish_point(double a, double x, const State3& y) {
  double rad, sc;
  const double xfpp = p3_xfpp(a, x, y[0], y[1], rad, sc);
  if (rad < -kBranchTol * sc) {
    throw BranchLossError("hard-edge ODE lost its square-root branch at x = " + std::to_string(x),
                          x);
  }
  return {y[0], y[1], xfpp / x, y[2]};
}

}  // namespace

P3Point p3_series(double a, double x) {
  if (a == 0.0) return {-x, -1.0, 0.0, -x};
  P3Point r;
  if (x == 0.0) {
    const double d0 = std::exp(-sf::log_gamma(a + 1.0) - sf::log_gamma(a + 2.0));
    r.f_doubleprime = a > 1.0 ? 0.0 : (a == 1.0 ? -2.0 * d0 : -INFINITY);
    return r;
  }
  const double lx = std::log(x);
  for (int k = 0; k < 400; ++k) {
    // d_k = (-1)^k Γ(2a+2k+1) / (k! Γ(a+k+1)^2 Γ(2a+k+1) (a+k+1))
    const double kk = k;
    const double logd = sf::log_gamma(2 * a + 2 * kk + 1) - sf::log_gamma(kk + 1) -
                        2 * sf::log_gamma(a + kk + 1) - sf::log_gamma(2 * a + kk + 1) -
                        std::log(a + kk + 1);
    const double sgn = (k % 2) ? -1.0 : 1.0;
    const double e = a + 1 + kk;
    const double term = sgn * std::exp(logd + e * lx);  // d_k x^{a+1+k}
    r.f -= term;
    r.f_prime -= term * e / x;
    r.f_doubleprime -= term * e * (e - 1) / (x * x);
    r.log_F -= term / e;
    if (std::fabs(term) < 1e-18 * std::fabs(r.f)) break;
  }
  return r;
}

PIIISolution solve_p3(double a, double x_max, const ODESolverConfig& config) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("solve_p3: a must be >= 0");
  if (!(x_max > 0.0 && x_max <= 50.0)) throw DomainError("solve_p3: x_max must lie in (0, 50]");
  if (config.grid_points < 2) throw DomainError("solve_p3: grid_points must be >= 2");
  if (!(config.rtol > 0.0 && config.atol > 0.0 && config.x0 > 0.0)) {
    throw DomainError("solve_p3: tolerances and x0 must be positive");
  }
  PIIISolution s;
  s.a = a;
  s.x_max = x_max;
  s.config = config;
  s.x_launch = a == 0.0 ? 0.0 : launch_point(a, config.x0);
  const auto n = static_cast<std::size_t>(config.grid_points);
  s.grid.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.grid[i] = x_max * static_cast<double>(i) / (n - 1);
  s.grid.back() = x_max;
  s.f.resize(n);
  s.f_prime.resize(n);
  s.f_doubleprime.resize(n);
  s.log_F.resize(n);

  auto store = [&](std::size_t i, const P3Point& p) {
    s.f[i] = p.f;
    s.f_prime[i] = p.f_prime;
    s.f_doubleprime[i] = p.f_doubleprime;
    s.log_F[i] = p.log_F;
  };

  std::size_t first = 0;
  while (first < n && (a == 0.0 || s.grid[first] <= s.x_launch)) {
    store(first, p3_series(a, s.grid[first]));
    ++first;
  }
  if (first == n) return s;

  const P3Point p0 = p3_series(a, s.x_launch);
  State3 y{p0.f, p0.f_prime, p0.log_F};
  const double atol = effective_atol(s);
  double x_prev = s.x_launch;
  for (std::size_t i = first; i < n; ++i) {
    integrate_p3(a, y, x_prev, s.grid[i], atol, config.rtol);
    x_prev = s.grid[i];
    store(i, finish_point(a, s.grid[i], y));
  }
  return s;
}

P3Point PIIISolution::at(double x) const {
  if (!(x >= 0.0 && x <= x_max * (1.0 + 1e-12))) {
    throw GridError("x = " + std::to_string(x) + " outside hard-edge grid [0, " +
                    std::to_string(x_max) + "]");
  }
  if (a == 0.0 || x <= x_launch) return p3_series(a, x);
  // Nearest node at or below x that the ODE (not the series) produced.
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t i = static_cast<std::size_t>(it - grid.begin());
  i = i == 0 ? 0 : i - 1;
  State3 y;
  double x_from;
  if (grid[i] <= x_launch) {
    const P3Point p0 = p3_series(a, x_launch);
    y = {p0.f, p0.f_prime, p0.log_F};
    x_from = x_launch;
  } else {
    y = {f[i], f_prime[i], log_F[i]};
    x_from = grid[i];
  }
  if (x == x_from) return finish_point(a, x, y);
  integrate_p3(a, y, x_from, x, effective_atol(*this), config.rtol);
  return finish_point(a, x, y);
}

double p3_residual(double a, double x, double f, double fp, double fpp) {
  const double xf = x * fpp;
  const double r = xf * xf + 4.0 * fp * (1.0 + fp) * (x * fp - f) - (a * fp) * (a * fp);
  return std::fabs(r) / ((a * fp) * (a * fp) + 1e-30);
}

double bessel_det_f(int a, double x, const PrecisionContext& ctx) {
  ctx.validate();
  if (a < 0 || a > 10) throw DomainError("bessel_det_f: a must be an integer in [0, 10]");
  if (!(x >= 0.0)) throw DomainError("bessel_det_f: x must be >= 0");
  if (a == 0) return -x;
  if (x == 0.0) return 0.0;
  const DoubleDouble z = sqrt(DoubleDouble(x)) * 2.0;
  std::vector<DoubleDouble> I(static_cast<std::size_t>(a) + 2);
  for (int k = 0; k <= a + 1; ++k) I[static_cast<std::size_t>(k)] = sf::bessel_i(k, z, 1e-32);
  const auto n = static_cast<std::size_t>(a);
  std::vector<DoubleDouble> num(n * n), den(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const int d = static_cast<int>(j) - static_cast<int>(k);
      num[j * n + k] = I[static_cast<std::size_t>(std::abs(d + 2))];
      den[j * n + k] = I[static_cast<std::size_t>(std::abs(d))];
    }
  }
  const auto fn = lu_factor(num, n);
  const auto fd = lu_factor(den, n);
  const double kappa = std::max(condition_number_1(num, fn), condition_number_1(den, fd));
  const double certified = 31.0 - std::log10(kappa);
  if (!(certified >= 8.0)) {
    throw ConditioningError("Bessel determinant retains only " + std::to_string(certified) +
                                " certified digits",
                            certified);
  }
  return (-DoubleDouble(x) * fn.determinant() / fd.determinant()).to_double();
}

double limiting_cdf(const PIIISolution& p3, double x) { return std::exp(p3.at(x).log_F); }

namespace {

// int_lo^hi f(u)/u du for the Bessel-determinant f; the integrand is analytic
// on [0, inf), so fixed Gauss-Legendre panels of width <= 0.25 reach roundoff.
double bessel_log_cdf_piece(int a, double lo, double hi) {
  if (hi <= lo) return 0.0;
  auto integrand = [a](double u) { return u == 0.0 ? 0.0 : bessel_det_f(a, u) / u; };
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.25)));
  const double w = (hi - lo) / panels;
  double I = 0.0;
  for (int p = 0; p < panels; ++p) {
    I += boost::math::quadrature::gauss<double, 20>::integrate(integrand, lo + p * w,
                                                                p + 1 == panels ? hi : lo + (p + 1) * w);
  }
  return I;
}

}  // namespace

double limiting_cdf_bessel(int a, double x) {
  if (!(x >= 0.0)) throw DomainError("limiting_cdf_bessel: x must be >= 0");
  if (x == 0.0) return 1.0;
  return std::exp(bessel_log_cdf_piece(a, 0.0, x));
}

std::vector<double> limiting_cdf_bessel(int a, const std::vector<double>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  double prev = 0.0, I = 0.0;
  for (double x : xs) {
    if (!(x >= prev)) throw DomainError("limiting_cdf_bessel: grid must be increasing and >= 0");
    I += bessel_log_cdf_piece(a, prev, x);
    prev = x;
    out.push_back(std::exp(I));
  }
  return out;
}

CorrectedCdf corrected_cdf(const PIIISolution& p3, int N, double x) {
  if (N < 1) throw DomainError("corrected_cdf: N must be >= 1");
  const P3Point p = p3.at(x);
  const double c = p3.a / (2.0 * N);
  CorrectedCdf r;
  r.F_inf = std::exp(p.log_F);
  r.additive = r.F_inf + c * p.f * r.F_inf;
  r.exponential = std::exp(p.log_F + c * p.f);
  return r;
}

// ---------------------------------------------------------------- Painleve II

namespace {

// Large-negative-x expansion of the Hastings-McLeod solution.
double hm_left_asymptotic(double x) {
  const double x3 = x * x * x;
  return std::sqrt(-x / 2.0) *
         (1.0 + 1.0 / (8.0 * x3) - 73.0 / (128.0 * x3 * x3) + 10657.0 / (1024.0 * x3 * x3 * x3));
}

// Chebyshev-Lobatto differentiation matrix on [-1, 1] (Trefethen, Spectral
// Methods in MATLAB, cheb.m) with the negative-sum trick for the diagonal.
Eigen::MatrixXd cheb_matrix(int n) {
  Eigen::VectorXd x(n + 1), c(n + 1);
  for (int j = 0; j <= n; ++j) {
    x(j) = std::cos(M_PI * j / n);
    c(j) = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  }
  Eigen::MatrixXd D(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      D(i, j) = i == j ? 0.0 : (c(i) / c(j)) / (x(i) - x(j));
    }
  }
  for (int i = 0; i <= n; ++i) D(i, i) = -D.row(i).sum();
  return D;
}

ChebyshevSeries tail_from(const ChebyshevSeries& integral_from_lo) {
  // int_x^hi g = I(hi) - I(x)
  std::vector<double> c = integral_from_lo.coeffs();
  const double at_hi = integral_from_lo(integral_from_lo.hi());
  for (auto& v : c) v = -v;
  c[0] += at_hi;
  return ChebyshevSeries(integral_from_lo.lo(), integral_from_lo.hi(), std::move(c));
}

void check_soft_grid(const PIISolution& p2, double x) {
  if (!(x >= p2.config.x_min - 1e-12 && x <= p2.config.x_max + 1e-12)) {
    throw GridError("x = " + std::to_string(x) + " outside soft-edge grid [" +
                    std::to_string(p2.config.x_min) + ", " + std::to_string(p2.config.x_max) +
                    "]");
  }
}

// int_R^inf Ai^2 and int_R^inf (x - R) Ai^2 in closed form; q = Ai to O(Ai^3) there.
double airy_tail_q2(double R) {
  const double A = airy_ai(R), Ap = airy_ai_prime(R);
  return Ap * Ap - R * A * A;
}
double airy_tail_xq2(double R) {
  const double A = airy_ai(R), Ap = airy_ai_prime(R);
  return (2.0 * R * R * A * A - 2.0 * R * Ap * Ap - A * Ap) / 3.0;
}

}  // namespace

double PIISolution::q_at(double x) const {
  check_soft_grid(*this, x);
  return q_series(x);
}

double PIISolution::q_prime_at(double x) const {
  check_soft_grid(*this, x);
  return qp_series(x);
}

PIISolution solve_p2_hastings_mcleod(const PIIConfig& cfg) {
  if (!(cfg.x_min >= -8.0 && cfg.x_max <= 10.0 && cfg.x_min < cfg.x_max)) {
    throw DomainError("solve_p2_hastings_mcleod: need -8 <= x_min < x_max <= 10");
  }
  if (cfg.x_max < 4.0) throw DomainError("solve_p2_hastings_mcleod: x_max must be >= 4");
  if (!(cfg.left_pad >= 0.0) || cfg.nodes < 16 || cfg.grid_points < 2) {
    throw DomainError("solve_p2_hastings_mcleod: invalid discretisation settings");
  }
  const double L = cfg.x_min - cfg.left_pad;
  const double R = cfg.x_max;
  const int n = cfg.nodes;
  const double sc = 2.0 / (R - L);
  const Eigen::MatrixXd D = cheb_matrix(n) * sc;
  const Eigen::MatrixXd D2 = D * D;
  const std::vector<double> xs = ChebyshevSeries::lobatto_nodes(L, R, n);
  const Eigen::Map<const Eigen::VectorXd> X(xs.data(), n + 1);

  const double q_right = airy_ai(R);
  const double q_left = hm_left_asymptotic(L);

  Eigen::VectorXd q(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double x = X(j);
    const double base = std::sqrt((std::sqrt(x * x + 1.0) - x) / 4.0);
    q(j) = base * std::exp(-(2.0 / 3.0) * std::pow(std::max(x, 0.0), 1.5));
  }

  auto residual = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd r = D2 * v - (X.array() * v.array() + 2.0 * v.array().cube()).matrix();
    r(0) = v(0) - q_right;
    r(n) = v(n) - q_left;
    return r;
  };

  PIISolution s;
  s.config = cfg;
  Eigen::VectorXd r = residual(q);
  double rnorm = r.lpNorm<Eigen::Infinity>();
  bool converged = false;
  int it = 0;
  for (; it < cfg.max_newton_iter; ++it) {
    Eigen::MatrixXd J = D2;
    J.diagonal().array() -= X.array() + 6.0 * q.array().square();
    J.row(0).setZero();
    J(0, 0) = 1.0;
    J.row(n).setZero();
    J(n, n) = 1.0;
    const Eigen::VectorXd dq = J.partialPivLu().solve(-r);
    // Damped step: halve until the residual does not grow.
    double lam = 1.0;
    Eigen::VectorXd qn = q + dq;
    Eigen::VectorXd rn = residual(qn);
    for (int h = 0; h < 20 && rn.lpNorm<Eigen::Infinity>() > rnorm && lam > 1e-6; ++h) {
      lam *= 0.5;
      qn = q + lam * dq;
      rn = residual(qn);
    }
    const double step = lam * dq.lpNorm<Eigen::Infinity>();
    q = qn;
    r = rn;
    rnorm = r.lpNorm<Eigen::Infinity>();
    if (lam == 1.0 && step <= cfg.newton_tol * std::max(1.0, q.lpNorm<Eigen::Infinity>())) {
      converged = true;
      ++it;
      break;
    }
  }
  s.newton_iterations = it;
  s.newton_residual = rnorm;
  if (!converged) {
    throw ConvergenceError("Hastings-McLeod collocation did not converge after " +
                           std::to_string(it) + " Newton iterations (residual " +
                           std::to_string(rnorm) + ")");
  }

  std::vector<double> qv(q.data(), q.data() + n + 1);
  s.q_series = ChebyshevSeries::from_lobatto_values(L, R, qv);
  // q'(x) = Ai'(R) - int_x^R (u q + 2 q^3): spectral differentiation loses
  // ~n^2 u at the endpoints, where q' is smallest.
  std::vector<double> qppv(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    qppv[ju] = xs[ju] * qv[ju] + 2.0 * qv[ju] * qv[ju] * qv[ju];
  }
  {
    const ChebyshevSeries tail =
        tail_from(ChebyshevSeries::from_lobatto_values(L, R, qppv).integral());
    std::vector<double> c = tail.coeffs();
    for (auto& v : c) v = -v;
    c[0] += airy_ai_prime(R);
    s.qp_series = ChebyshevSeries(L, R, std::move(c));
  }
  {
    const ChebyshevSeries dq = s.q_series.derivative();
    double worst = 0.0;
    for (int j = 0; j <= 400; ++j) {
      const double x = cfg.x_min + (R - cfg.x_min) * j / 400.0;
      worst = std::max(worst, std::fabs(dq(x) - s.qp_series(x)));
    }
    s.qprime_route_mismatch = worst;
    if (worst > 1e-8) {
      s.warnings.push_back("q' from integration and differentiation differ by " +
                           std::to_string(worst));
    }
  }
  std::vector<double> h0v(static_cast<std::size_t>(n) + 1), q2v(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const double qq = qv[ju], qp = s.qp_series(xs[ju]);
    h0v[ju] = qp * qp - qq * qq * qq * qq - xs[ju] * qq * qq;
    q2v[ju] = qq * qq;
  }
  s.h0_series = ChebyshevSeries::from_lobatto_values(L, R, h0v);
  s.h0_tail_integral = tail_from(s.h0_series.integral());
  s.q2_tail_integral = tail_from(ChebyshevSeries::from_lobatto_values(L, R, q2v).integral());

  const auto m = static_cast<std::size_t>(cfg.grid_points);
  s.grid.resize(m);
  s.q.resize(m);
  s.q_prime.resize(m);
  s.h0_tilde.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = cfg.x_min + (cfg.x_max - cfg.x_min) * static_cast<double>(i) / (m - 1);
    s.grid[i] = x;
    s.q[i] = s.q_series(x);
    s.q_prime[i] = s.qp_series(x);
    s.h0_tilde[i] = h0_tilde(s, x);
  }
  s.grid.back() = cfg.x_max;
  return s;
}

double h0_tilde(const PIISolution& p2, double x) {
  const double q = p2.q_at(x), qp = p2.q_prime_at(x);
  return qp * qp - q * q * q * q - x * q * q;
}

double h0_tilde_quadrature(const PIISolution& p2, double x) {
  check_soft_grid(p2, x);
  return p2.q2_tail_integral(x) + airy_tail_q2(p2.config.x_max);
}

double tw2_cdf(const PIISolution& p2, double s) {
  check_soft_grid(p2, s);
  // the exponent is a nonnegative integral; clip roundoff so F <= 1
  return std::exp(-std::max(0.0, p2.h0_tail_integral(s) + airy_tail_xq2(p2.config.x_max)));
}

double tw2_cdf_quadrature(const PIISolution& p2, double s) {
  check_soft_grid(p2, s);
  const double R = p2.config.x_max;
  auto integrand = [&](double x) {
    const double q = p2.q_series(x);
    return (x - s) * q * q;
  };
  const double I =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, s, R, 20, 1e-14);
  const double A = airy_ai(R), Ap = airy_ai_prime(R);
  // int_R^inf (x - s) Ai^2 = int_R^inf (x - R) Ai^2 + (R - s) int_R^inf Ai^2
  const double tail = airy_tail_xq2(R) + (R - s) * (Ap * Ap - R * A * A);
  return std::exp(-std::max(0.0, I + tail));
}

// ------------------------------------------------------- soft-edge correction

double h1_tail_seed(double A, double x) {
  return A * (std::exp(-(4.0 / 3.0) * x * std::sqrt(x)) / std::sqrt(x));
}

namespace {

// Slope of the decaying branch of the h1 equation, whose large-x form is
// x^{-1} exp(-(4/3) x^{3/2}); the x^{-1/2} prefactor only fixes the seed value.
double h1_tail_seed_prime(double A, double x) {
  return h1_tail_seed(A, x) * (-1.0 / x - 2.0 * std::sqrt(x));
}

struct H1System {
  const PIISolution* p2;
  void operator()(const State3& y, State3& dy, double x) const {
    const H1Coefficients c = h1_coefficients(*p2, x);
    dy[0] = y[1];
    dy[1] = -(c.c1 * y[1] + c.c0 * y[0]) / c.c2;
    dy[2] = -y[0];
  }
};

void integrate_h1(const PIISolution& p2, State3& y, double x_from, double x_to, double atol,
                  double rtol) {
  try {
    auto stepper = odeint::make_controlled<Stepper>(atol, rtol);
    odeint::integrate_adaptive(stepper, H1System{&p2}, y, x_from, x_to, (x_to - x_from) / 64.0);
  } catch (const odeint::step_adjustment_error& e) {
    throw ConvergenceError(std::string("h1 ODE step-size underflow: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw ConvergenceError(std::string("h1 ODE made no progress: ") + e.what());
  }
}

double h1_atol(const PIISolution& p2, double base) {
  return base * std::fabs(h1_tail_seed(p2.h1_amplitude, p2.config.x_max));
}

}  // namespace

H1Coefficients h1_coefficients(const PIISolution& p2, double x) {
  const double q = p2.q_series(x), qp = p2.qp_series(x);
  const double h0 = qp * qp - q * q * q * q - x * q * q;
  const double h0p = -q * q;
  const double h0pp = -2.0 * q * qp;
  return {2.0 * h0p, 2.0 * (h0 + h0p * (3.0 * h0p - 2.0 * x)), h0pp};
}

void solve_h1_correction(PIISolution& p2, const H1Config& cfg) {
  if (p2.grid.empty()) throw DomainError("solve_h1_correction: Painleve II solution is empty");
  if (!(cfg.rtol > 0.0 && cfg.atol > 0.0)) {
    throw DomainError("solve_h1_correction: tolerances must be positive");
  }
  p2.h1_amplitude = cfg.amplitude;
  p2.h1_config = cfg;
  p2.h1_amplitude_convention =
      "h1 ~ A x^(-1/2) exp(-(4/3) x^(3/2)) as x -> +inf, seeded at x_max; A = " +
      std::to_string(cfg.amplitude) + " (A is not fixed by the analysis; scale freely)";
  p2.warnings.clear();
  const double R = p2.config.x_max;
  const std::size_t m = p2.grid.size();
  p2.h1_tilde.assign(m, 0.0);
  p2.h1_tilde_prime.assign(m, 0.0);
  p2.h1_integral.assign(m, 0.0);
  if (cfg.amplitude == 0.0) return;

  const double tail = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double x) { return h1_tail_seed(cfg.amplitude, x); }, R, R + 6.0, 10, 1e-15);
  State3 y{h1_tail_seed(cfg.amplitude, R), h1_tail_seed_prime(cfg.amplitude, R), tail};
  const double atol = h1_atol(p2, cfg.atol);
  double x_prev = R;
  bool warned = false;
  for (std::size_t ii = m; ii-- > 0;) {
    const double x = p2.grid[ii];
    if (x != x_prev) integrate_h1(p2, y, x_prev, x, atol, cfg.rtol);
    x_prev = x;
    p2.h1_tilde[ii] = y[0];
    p2.h1_tilde_prime[ii] = y[1];
    p2.h1_integral[ii] = y[2];
    const double c2 = h1_coefficients(p2, x).c2;
    if (!warned && !(c2 > 1e-300)) {
      p2.warnings.push_back("h0'' vanishes near x = " + std::to_string(x) +
                            "; h1 coefficients degenerate");
      warned = true;
    }
  }
}

H1Point h1_at(const PIISolution& p2, double x) {
  check_soft_grid(p2, x);
  if (p2.h1_tilde.empty()) throw DomainError("h1_at: solve_h1_correction has not been run");
  if (p2.h1_amplitude == 0.0) return {};
  // Start from the nearest node at or above x (integration runs leftward).
  const auto it = std::lower_bound(p2.grid.begin(), p2.grid.end(), x);
  const auto i = static_cast<std::size_t>(it - p2.grid.begin());
  State3 y{p2.h1_tilde[i], p2.h1_tilde_prime[i], p2.h1_integral[i]};
  if (p2.grid[i] != x) {
    integrate_h1(p2, y, p2.grid[i], x, h1_atol(p2, p2.h1_config.atol), p2.h1_config.rtol);
  }
  return {y[0], y[1], y[2]};
}

double p5_residual(double H, double Hp, double Hpp, double t, int N, double a) {
  if (!(t > 0.0)) throw DomainError("p5_residual requires t > 0");
  const double nn = static_cast<double>(N) * (N + a);
  const double t1 = (t * Hpp) * (t * Hpp);
  const double t2 = 4.0 * Hp * Hp * (H - nn - t * Hp);
  const double inner = (2.0 * N + a - t) * Hp + H;
  const double t3 = inner * inner;
  const double big = std::max({std::fabs(t1), std::fabs(t2), std::fabs(t3)});
  if (big == 0.0) return 0.0;
  return std::fabs(t1 - t2 - t3) / big;
}

}  // namespace wshart
