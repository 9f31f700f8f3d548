#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wshart/errors.hpp"
#include "wshart/painleve.hpp"
#include "wshart/special_functions.hpp"

using namespace wshart;

namespace {

const PIISolution& hm() {
  static const PIISolution p2 = [] {
    PIISolution s = solve_p2_hastings_mcleod();
    solve_h1_correction(s);
    return s;
  }();
  return p2;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

// ---------------------------------------------------------------- hard edge

TEST_CASE("p3: a = 0 is exactly f = -x") {
  const auto s = solve_p3(0.0, 10.0);
  for (std::size_t i = 0; i < s.grid.size(); i += 50) {
    CHECK(s.f[i] == -s.grid[i]);
    CHECK(s.f_prime[i] == -1.0);
    CHECK(std::exp(s.log_F[i]) == doctest::Approx(std::exp(-s.grid[i])).epsilon(1e-14));
  }
}

TEST_CASE("p3: small-x leading behaviour") {
  const auto s = solve_p3(2.0, 1.0);
  // f = -x^3/12 (1 + O(x)); the full value comes from the Bessel route
  CHECK(rel(s.at(1e-3).f, -1e-9 / 12.0) < 2e-3);
  CHECK(rel(s.at(0.1).f, bessel_det_f(2, 0.1)) < 1e-8);
  const auto ser = p3_series(2.0, 1e-4);
  CHECK(rel(ser.f, -1e-12 / 12.0) < 1e-4);
}

TEST_CASE("p3: a = 1 at x = 1 equals -I2(2)/I0(2)") {
  const double ref = -bessel_i(2, 2.0) / bessel_i(0, 2.0);
  const auto s = solve_p3(1.0, 10.0);
  CHECK(std::fabs(s.at(1.0).f - ref) <= 1e-6);
  CHECK(std::fabs(bessel_det_f(1, 1.0) - ref) <= 1e-14);
  CHECK(ref == doctest::Approx(-0.302225).epsilon(1e-5));
}

TEST_CASE("p3: grid invariants and plug-back residual on the stored grid") {
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    const auto s = solve_p3(a, 10.0);
    REQUIRE(s.grid.size() == 2001);
    CHECK(s.grid.front() == 0.0);
    CHECK(s.grid.back() == 10.0);
    CHECK(s.f[0] == 0.0);
    double worst = 0.0;
    for (std::size_t i = 1; i < s.grid.size(); ++i) {
      CHECK(s.grid[i] > s.grid[i - 1]);
      CHECK(s.f[i] <= 0.0);
      CHECK(s.f_prime[i] <= 0.0);
      worst = std::max(worst, std::fabs(p3_residual(a, s.grid[i], s.f[i], s.f_prime[i],
                                                    s.f_doubleprime[i])));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("p3: residual with finite-difference derivatives of a tight solve") {
  ODESolverConfig tight;
  tight.rtol = 1e-13;
  tight.atol = 1e-15;
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    const auto s = solve_p3(a, 10.5, tight);
    auto f = [&](double x) { return s.at(x).f; };
    double worst = 0.0;
    for (double x = 0.5; x <= 10.0; x += 0.25) {
      const double fp = oracle::d1(f, x, 1e-3);
      const double fpp = oracle::d2(f, x, 1e-3);
      worst = std::max(worst, std::fabs(p3_residual(a, x, f(x), fp, fpp)));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("p3: launch point insensitivity") {
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    ODESolverConfig c1, c2;
    c2.x0 = c1.x0 / 10.0;
    const auto s1 = solve_p3(a, 10.0, c1);
    const auto s2 = solve_p3(a, 10.0, c2);
    double drift = 0.0;
    for (std::size_t i = 0; i < s1.grid.size(); ++i) {
      drift = std::max(drift, std::fabs(s1.f[i] - s2.f[i]));
    }
    CHECK(drift <= 1e-8);
  }
}

TEST_CASE("p3: agreement with the Bessel determinant for integer a") {
  for (int a : {1, 2, 3}) {
    const auto s = solve_p3(a, 10.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      if (s.grid[i] < 0.01) continue;
      worst = std::max(worst, std::fabs(s.f[i] - bessel_det_f(a, s.grid[i])));
    }
    CHECK(worst <= 1e-6);
  }
  CHECK(std::fabs(solve_p3(2.0, 2.0).at(1.0).f - bessel_det_f(2, 1.0)) <= 1e-6);
}

TEST_CASE("bessel determinant: boundary cases and errors") {
  for (int a = 0; a <= 10; ++a) CHECK(bessel_det_f(a, 0.0) == 0.0);
  for (double x : {0.3, 4.0}) CHECK(bessel_det_f(0, x) == -x);
  CHECK_THROWS_AS(bessel_det_f(11, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_det_f(-1, 1.0), DomainError);
  // Leading small-x term -x^{a+1}/(a!(a+1)!).
  CHECK(rel(bessel_det_f(3, 1e-3), -1e-12 / 144.0) < 1e-3);
}

TEST_CASE("limiting cdf: closed forms and two routes") {
  const auto s0 = solve_p3(0.0, 5.0);
  CHECK(limiting_cdf(s0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  const auto s1 = solve_p3(1.0, 10.0);
  CHECK(limiting_cdf(s1, 0.0) == 1.0);
  // a = 1: F_inf(x) = e^{-x} I0(2 sqrt x).
  for (double x : {0.5, 1.0, 4.0, 9.0}) {
    const double ref = std::exp(-x) * bessel_i(0, 2.0 * std::sqrt(x));
    CHECK(std::fabs(limiting_cdf(s1, x) - ref) <= 1e-8);
    CHECK(std::fabs(limiting_cdf_bessel(1, x) - ref) <= 1e-12);
  }
  std::vector<double> xs;
  for (int i = 0; i <= 400; ++i) xs.push_back(i * 0.025);
  const auto Fg = limiting_cdf_bessel(1, xs);
  for (std::size_t i = 0; i < xs.size(); i += 40) {
    const double ref = std::exp(-xs[i]) * bessel_i(0, 2.0 * std::sqrt(xs[i]));
    CHECK(std::fabs(Fg[i] - ref) <= 1e-12);
  }
  CHECK_THROWS_AS(limiting_cdf_bessel(1, std::vector<double>{1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(limiting_cdf(s1, 10.5), GridError);
  CHECK_THROWS_AS(limiting_cdf(s1, -0.1), GridError);
  CHECK_THROWS_AS(s1.at(11.0), GridError);
}

TEST_CASE("limiting cdf: monotone to zero") {
  for (double a : {0.5, 1.0, 2.5}) {
    const auto s = solve_p3(a, 40.0);
    double prev = 1.0;
    for (std::size_t i = 1; i < s.grid.size(); ++i) {
      const double F = std::exp(s.log_F[i]);
      CHECK(F < prev);
      prev = F;
    }
    CHECK(prev < 1e-6);
  }
}

TEST_CASE("corrected cdf: both forms") {
  const auto s0 = solve_p3(0.0, 5.0);
  const auto c0 = corrected_cdf(s0, 50, 1.5);
  CHECK(c0.additive == doctest::Approx(std::exp(-1.5)).epsilon(1e-14));
  CHECK(c0.exponential == doctest::Approx(std::exp(-1.5)).epsilon(1e-14));
  const auto s1 = solve_p3(1.0, 5.0);
  const auto big = corrected_cdf(s1, 1000000000, 1.0);
  CHECK(std::fabs(big.additive - big.F_inf) < 1e-9);
  const auto c = corrected_cdf(s1, 50, 1.0);
  const double f = s1.at(1.0).f;
  const double y = f / (2.0 * 50);
  CHECK(std::fabs(c.additive - c.exponential) <= y * y * c.F_inf);
  CHECK(std::fabs(c.additive - c.exponential) > 0.0);
}

// ---------------------------------------------------------------- soft edge

TEST_CASE("p2: Hastings-McLeod boundary behaviour") {
  const auto& p2 = hm();
  CHECK(std::fabs(p2.q_at(6.0) - airy_ai(6.0)) <= 1e-8);
  CHECK(rel(p2.q_at(-8.0), 2.0) <= 0.02);
  CHECK(p2.q_at(0.0) == doctest::Approx(0.36706).epsilon(1e-4 / 0.36706));
  CHECK(std::fabs(p2.q_prime_at(p2.config.x_max) - airy_ai_prime(p2.config.x_max)) <= 1e-15);
  CHECK(std::fabs(p2.q_prime_at(6.0) - airy_ai_prime(6.0)) <= 1e-12);
  CHECK(p2.qprime_route_mismatch <= 1e-8);
  CHECK(p2.newton_residual <= 1e-8);
  CHECK_THROWS_AS(p2.q_at(-8.5), GridError);
  CHECK_THROWS_AS(p2.q_at(10.5), GridError);
}

TEST_CASE("p2: positivity and ODE residual on the grid") {
  const auto& p2 = hm();
  for (double v : p2.q) CHECK(v > 0.0);
  auto q = [&](double x) { return p2.q_at(x); };
  double worst = 0.0;
  for (double x = -7.9; x <= 9.9; x += 0.1) {
    const double r = oracle::d2(q, x, 1e-3) - x * q(x) - 2 * std::pow(q(x), 3);
    worst = std::max(worst, std::fabs(r));
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("p2: tighter independent shooting oracle at x = 0") {
  // Shoot backward from x = 6 with Airy data using RK4 in long double.
  long double x = 6.0L, y = airy_ai(6.0), yp = airy_ai_prime(6.0);
  const int n = 60000;
  const long double h = -6.0L / n;
  auto f = [](long double s, long double u) { return s * u + 2 * u * u * u; };
  for (int i = 0; i < n; ++i) {
    const long double k1y = yp, k1p = f(x, y);
    const long double k2y = yp + 0.5L * h * k1p, k2p = f(x + 0.5L * h, y + 0.5L * h * k1y);
    const long double k3y = yp + 0.5L * h * k2p, k3p = f(x + 0.5L * h, y + 0.5L * h * k2y);
    const long double k4y = yp + h * k3p, k4p = f(x + h, y + h * k3y);
    y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    yp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    x += h;
  }
  CHECK(std::fabs(hm().q_at(0.0) - static_cast<double>(y)) <= 1e-7);
}

TEST_CASE("h0: identity, derivative and monotonicity") {
  const auto& p2 = hm();
  double worst = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.05) {
    worst = std::max(worst, std::fabs(h0_tilde(p2, x) - h0_tilde_quadrature(p2, x)));
  }
  CHECK(worst <= 1e-8);
  auto h0 = [&](double x) { return h0_tilde(p2, x); };
  double prev = h0(-8.0);
  for (double x = -7.5; x <= 7.5; x += 0.5) {
    CHECK(std::fabs(oracle::d1(h0, x, 1e-3) + std::pow(p2.q_at(x), 2)) <= 1e-6);
    CHECK(h0(x) >= 0.0);
    CHECK(h0(x) < prev);
    prev = h0(x);
  }
  CHECK(h0_tilde(p2, 10.0) < 1e-15);
}

TEST_CASE("tracy-widom F2: two routes and limits") {
  const auto& p2 = hm();
  CHECK(std::fabs(tw2_cdf(p2, 0.0) - tw2_cdf_quadrature(p2, 0.0)) <= 1e-5);
  CHECK(std::fabs(tw2_cdf(p2, -3.0) - tw2_cdf_quadrature(p2, -3.0)) <= 1e-8);
  CHECK(tw2_cdf(p2, 0.0) == doctest::Approx(0.96937282835).epsilon(1e-9));
  CHECK(tw2_cdf(p2, 10.0) == doctest::Approx(1.0).epsilon(1e-15));
  double prev = 0.0;
  for (double s = -8.0; s <= 10.0; s += 0.25) {
    const double F = tw2_cdf(p2, s);
    CHECK(F <= 1.0);
    if (F < 1.0) CHECK(F > prev);
    else CHECK(F >= prev);
    prev = F;
  }
}

TEST_CASE("h1: records its normalization convention") {
  const auto& p2 = hm();
  CHECK(p2.h1_amplitude == 1.0);
  CHECK(p2.h1_amplitude_convention.find("A = 1") != std::string::npos);
  CHECK(p2.h1_tilde.size() == p2.grid.size());
}

TEST_CASE("h1: exact linearity in the tail amplitude") {
  PIISolution a = hm();
  PIISolution b = hm();
  H1Config c2;
  c2.amplitude = 2.0;
  solve_h1_correction(b, c2);
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    CHECK(b.h1_tilde[i] == 2.0 * a.h1_tilde[i]);
    CHECK(b.h1_integral[i] == 2.0 * a.h1_integral[i]);
  }
  CHECK(h1_at(b, -1.3).h1 == 2.0 * h1_at(a, -1.3).h1);
}

TEST_CASE("h1: plug-back residual with finite-difference h1''") {
  const auto& p2 = hm();
  const double delta = 1e-4;
  double worst = 0.0;
  for (double x = -2.0; x <= 6.0; x += 0.125) {
    const auto c = h1_coefficients(p2, x);
    const auto p = h1_at(p2, x);
    const double hpp = (h1_at(p2, x + delta).h1_prime - h1_at(p2, x - delta).h1_prime) / (2 * delta);
    const double t0 = c.c0 * p.h1, t1 = c.c1 * p.h1_prime, t2 = c.c2 * hpp;
    const double scale = std::max({std::fabs(t0), std::fabs(t1), std::fabs(t2)});
    worst = std::max(worst, std::fabs(t0 + t1 + t2) / scale);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("h1: coefficients follow from q") {
  const auto& p2 = hm();
  for (double x : {-3.0, 0.0, 2.5}) {
    const auto c = h1_coefficients(p2, x);
    const double q = p2.q_at(x), qp = p2.q_prime_at(x), h0 = h0_tilde(p2, x);
    CHECK(c.c0 == doctest::Approx(-2 * q * q).epsilon(1e-12));
    CHECK(c.c2 == doctest::Approx(-2 * q * qp).epsilon(1e-12));
    CHECK(c.c1 == doctest::Approx(2 * (h0 - q * q * (-3 * q * q - 2 * x))).epsilon(1e-10));
  }
}

TEST_CASE("h1: decaying tail is x^-1 exp(-(4/3) x^(3/2))") {
  const auto& p2 = hm();
  const double xm = p2.config.x_max;
  auto shape = [](double x, double beta) { return std::pow(x, beta) * std::exp(-4.0 / 3.0 * std::pow(x, 1.5)); };
  const double C = h1_tail_seed(1.0, xm) / shape(xm, -1.0);
  for (double x : {8.0, 9.0}) {
    CHECK(rel(h1_at(p2, x).h1, C * shape(x, -1.0)) < 0.01);
  }
  // Local exponent beta = x h1'/h1 + 2 x^{3/2} approaches -1 with an
  // O(x^{-3/2}) correction; an x^{-1/2} tail would put (beta + 1) x^{3/2} near
  // x^{3/2} / 2 instead.
  for (double x : {5.0, 6.0, 7.0, 8.0, 9.0}) {
    const auto p = h1_at(p2, x);
    const double beta = x * p.h1_prime / p.h1 + 2.0 * std::pow(x, 1.5);
    const double scaled = (beta + 1.0) * std::pow(x, 1.5);
    CHECK(scaled > 0.5);
    CHECK(scaled < 1.5);
  }
  // The x^{-1/2} shape, matched at x_max, misses by more than 1% at x = 8.
  const double C_half = h1_tail_seed(1.0, xm) / shape(xm, -0.5);
  CHECK(rel(h1_at(p2, 8.0).h1, C_half * shape(8.0, -0.5)) > 0.05);
}
