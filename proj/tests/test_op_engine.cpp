#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wshart/errors.hpp"
#include "wshart/op_engine.hpp"
#include "wshart/painleve.hpp"
#include "wshart/special_functions.hpp"

using namespace wshart;

namespace {
const PrecisionContext kStd = PrecisionContext::standard();
const PrecisionContext kExt = PrecisionContext::extended();
double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }
double d(const DoubleDouble& x) { return x.to_double(); }
}  // namespace

TEST_CASE("model params validation") {
  CHECK_NOTHROW((ModelParams{1, 0.0, 0.0}.validate()));
  CHECK_THROWS_AS((ModelParams{0, 0.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((ModelParams{3, -0.1, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((ModelParams{3, 1.0, -1.0}.validate()), DomainError);
  CHECK_THROWS_AS((ModelParams{3, 1.0, NAN}.validate()), DomainError);
  CHECK_THROWS_AS(init_state<double>(-1.0, 1.0, kStd), DomainError);
}

TEST_CASE("init_state: closed forms") {
  for (double t : {0.0, 0.1, 0.7, 3.0, 25.0}) {
    CHECK(init_state<double>(0.0, t, kStd).S == doctest::Approx(t + 1.0).epsilon(1e-13));
  }
  for (double a : {0.0, 0.5, 2.0, 7.3}) {
    const auto s = init_state<DoubleDouble>(a, 0.0, kExt);
    CHECK(d(s.log_h) == doctest::Approx(std::lgamma(1.0 + a)).epsilon(1e-15));
    CHECK(d(s.S) == a + 1.0);
    CHECK(d(s.R) == 0.0);
    CHECK(d(s.zeta) == 0.0);
  }
  const auto s = init_state<DoubleDouble>(1.0, 1.0, kExt);
  CHECK(std::exp(d(s.log_h)) == doctest::Approx(2.0 / std::numbers::e).epsilon(1e-15));
  CHECK(d(s.sum_S) == 0.0);
}

TEST_CASE("advance: one hand-evaluated step") {
  const auto s0 = init_state<double>(0.0, 0.7, kStd);
  CHECK(s0.S == doctest::Approx(1.7).epsilon(1e-15));
  const auto s1 = advance(s0, 0.0, 0.7);
  CHECK(s1.R == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s1.S == doctest::Approx(3.7).epsilon(1e-14));
  CHECK(s1.zeta == doctest::Approx(-1.7).epsilon(1e-15));
}

TEST_CASE("advance: a = 0 closed form R_k = k^2, S_k = 2k+1+t") {
  for (double t : {0.05, 0.7, 2.0}) {
    const auto tr = build_trace<DoubleDouble>({60, 0.0, t}, kExt);
    for (int k = 0; k <= 60; ++k) {
      const auto& s = tr.states[k];
      CHECK(std::fabs(d(s.R) - double(k) * k) <= 1e-20 * std::max(1, k * k));
      CHECK(std::fabs(d(s.S) - (2.0 * k + 1.0 + t)) <= 1e-20 * (2.0 * k + 1.0));
      CHECK(d(s.zeta) == doctest::Approx(-double(k) * k - k * t).epsilon(1e-25));
    }
  }
}

TEST_CASE("t = 0 table for every a") {
  for (double a : {0.0, 0.5, 1.0, 3.7}) {
    const auto tr = build_trace<DoubleDouble>({25, a, 0.0}, kExt);
    for (int k = 0; k <= 25; ++k) {
      const auto& s = tr.states[k];
      CHECK(d(s.R) == doctest::Approx(k * (k + a)));
      CHECK(d(s.S) == doctest::Approx(2 * k + a + 1));
      CHECK(d(s.zeta) == doctest::Approx(-k * (k + a)));
      CHECK(d(s.log_h) ==
            doctest::Approx(std::lgamma(k + a + 1.0) + std::lgamma(k + 1.0)).epsilon(1e-14));
    }
    const auto r = compute_cdf({25, a, 0.0}, kStd);
    CHECK(r.F == 1.0);
    CHECK(*r.H == 0.0);
    CHECK(compute_H({25, a, 0.0}, kStd) == 0.0);
  }
}

TEST_CASE("small-t recursion approaches the t = 0 table") {
  const double a = 1.5;
  const auto tr = build_trace<DoubleDouble>({10, a, 1e-9}, kExt);
  for (int k = 1; k <= 10; ++k) {
    CHECK(rel(d(tr.states[k].R), k * (k + a)) < 1e-6);
    CHECK(rel(d(tr.states[k].S), 2 * k + a + 1) < 1e-6);
  }
}

TEST_CASE("compute_cdf: a = 0 exponential law and H = -Nt") {
  const auto r = compute_cdf({50, 0.0, 0.04}, kStd);
  CHECK(std::fabs(r.F - std::exp(-2.0)) <= 1e-10);
  CHECK(r.F == doctest::Approx(0.1353353).epsilon(1e-7));
  for (int N : {1, 7, 50, 100}) {
    for (double t : {0.01, 1.0 / N, 5.0 / N}) {
      const auto q = compute_cdf({N, 0.0, t}, kStd);
      CHECK(std::fabs(q.F - std::exp(-N * t)) <= 1e-10);
      CHECK(*q.H == doctest::Approx(-N * t).epsilon(1e-9));
      CHECK(pdf_smallest({N, 0.0, t}, kStd) == doctest::Approx(N * std::exp(-N * t)).epsilon(1e-9));
    }
  }
}

TEST_CASE("compute_cdf: multiple-integral oracle for integer a") {
  for (int N = 1; N <= 3; ++N) {
    for (int a = 0; a <= 3; ++a) {
      for (double t : {0.05, 0.4, 1.3, 3.0}) {
        const double ref = oracle::cdf_multiple_integral(N, a, t);
        CHECK(rel(compute_cdf({N, double(a), t}, kStd).F, ref) < 1e-11);
        CHECK(rel(hankel_oracle_cdf({N, double(a), t}, kStd), ref) < 1e-11);
      }
    }
  }
}

TEST_CASE("compute_cdf: single eigenvalue is the regularized gamma tail") {
  for (double a : {0.0, 0.5, 2.0, 3.7}) {
    for (double t : {0.1, 1.0, 4.0}) {
      const double ref = upper_incomplete_gamma(1.0 + a, t) / std::tgamma(1.0 + a);
      CHECK(rel(compute_cdf({1, a, t}, kStd).F, ref) < 1e-13);
      CHECK(rel(hankel_oracle_cdf({1, a, t}, kStd), ref) < 1e-13);
    }
  }
}

TEST_CASE("hankel oracle: 2x2 closed form and limits") {
  for (double t : {0.1, 0.9, 2.5}) {
    CHECK(rel(hankel_oracle_cdf({2, 0.0, t}, kStd), std::exp(-2 * t)) < 1e-13);
  }
  CHECK(rel(compute_cdf({3, 1.0, 0.5}, kStd).F, hankel_oracle_cdf({3, 1.0, 0.5}, kStd)) < 1e-10);
  CHECK(rel(compute_cdf({6, 0.5, 0.2}, kStd).F, hankel_oracle_cdf({6, 0.5, 0.2}, kStd)) < 1e-8);
  CHECK_THROWS_AS(hankel_oracle_cdf({13, 1.0, 0.5}, kStd), DomainError);
  CHECK_NOTHROW(hankel_oracle_cdf({20, 1.0, 0.05}, kExt));
  CHECK_THROWS_AS(hankel_oracle_cdf({31, 1.0, 0.5}, kExt), DomainError);
}

TEST_CASE("compute_H: finite-difference oracle") {
  const ModelParams p{4, 2.0, 0.3};
  auto logF = [&](double t) { return compute_cdf({p.N, p.a, t}, kExt).log_F; };
  const double fd = p.t * oracle::d1(logF, p.t, 1e-3);
  CHECK(std::fabs(compute_H(p, kStd) - fd) <= 1e-6 * std::max(1.0, std::fabs(fd)));
}

TEST_CASE("pdf: normalization and small-t behaviour") {
  // Integral of the density over [0, 20] equals 1 - F(20).
  const int N = 5;
  const double a = 1.0;
  auto p = [&](long double t) -> long double {
    if (t <= 0) return 0.0L;
    return pdf_smallest({N, a, static_cast<double>(t)}, kStd);
  };
  const double mass = static_cast<double>(oracle::integrate(p, 0.0L, 20.0L, 60));
  CHECK(std::fabs(mass - 1.0) <= 1e-6);
  // p ~ C t^a near zero for a > 0.
  const double r1 = pdf_smallest({N, 2.0, 1e-4}, kStd) / pdf_smallest({N, 2.0, 2e-4}, kStd);
  CHECK(r1 == doctest::Approx(0.25).epsilon(1e-3));
  CHECK_THROWS_AS(pdf_smallest({N, a, 0.0}, kStd), DomainError);
}

TEST_CASE("small t with large a: H scales like t^{a+1} without precision loss") {
  // theta and omega are O(t^{a+1}) here; the identities must still certify.
  for (int N : {1, 4, 9}) {
    for (double a : {4.5, 6.0, 8.0}) {
      for (double x : {1e-4, 1e-3}) {
        const double t = x / N;
        const auto r1 = compute_cdf({N, a, t}, kStd);
        const auto r2 = compute_cdf({N, a, 2.0 * t}, kStd);
        REQUIRE(r1.H.has_value());
        CHECK(*r1.H < 0.0);
        CHECK(*r2.H / *r1.H == doctest::Approx(std::pow(2.0, a + 1.0)).epsilon(1e-2));
        const auto rep = validate_identities(build_trace({N, a, t}, kExt), kExt);
        CHECK(rep.omega_identity <= 1e-9);
        CHECK(rep.quadratic <= 1e-9);
      }
    }
  }
  // single eigenvalue: H_1 = -t^{a+1} e^{-t} / Γ(1+a, t)
  const double a = 6.0, t = 1e-3;
  const double ref = -std::exp((a + 1) * std::log(t) - t - std::log(std::tgamma(a + 1.0)));
  CHECK(compute_H({1, a, t}, kStd) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("underflow is flagged rather than reported as a denormal") {
  const auto r = compute_cdf({200, 2.0, 20.0}, kStd);
  CHECK(r.underflow);
  CHECK(r.F == 0.0);
  CHECK(r.log_F < -700.0);
}

TEST_CASE("escalation: standard mode switches to double-double when needed") {
  const auto easy = compute_cdf({10, 1.0, 0.5}, kStd);
  CHECK(easy.mode_used == PrecisionMode::standard);
  const auto hard = compute_cdf({200, 2.0, 0.02}, kStd);
  const auto ext = compute_cdf({200, 2.0, 0.02}, kExt);
  CHECK(ext.mode_used == PrecisionMode::extended);
  CHECK(std::fabs(hard.F - ext.F) <= 1e-10);
  // The raw double recursion degenerates where the escalated path does not.
  bool degenerate = false;
  try {
    const auto raw = build_trace<double>({200, 2.0, 0.02}, kStd);
    degenerate = std::fabs(d(build_trace({200, 2.0, 0.02}, kExt).states[200].R) -
                           raw.states[200].R) > 1e-6 * raw.states[200].R;
  } catch (const DegenerateRecursionError& e) {
    degenerate = true;
    CHECK(e.index() > 0);
  }
  if (hard.mode_used == PrecisionMode::standard) CHECK_FALSE(degenerate);
}

TEST_CASE("identity suite: a = 0 trace is exact") {
  // forward error growth is roughly geometric in k; 20 digits survive at k = 30
  const auto tr = build_trace({30, 0.0, 0.6}, kExt);
  for (int k = 0; k <= 30; ++k) {
    CHECK(std::fabs(d(tr.theta(k) + DoubleDouble(0.6))) < 1e-20);
    CHECK(std::fabs(d(tr.omega(k) - DoubleDouble(0.6) * DoubleDouble(k))) < 1e-20 * (k + 1));
  }
  const auto rep = validate_identities(tr, kExt);
  CHECK(rep.omega_identity < 1e-28);
  CHECK(rep.quadratic < 1e-28);
}

TEST_CASE("identity suite: residual thresholds at N = 6, a = 2, t = 0.4") {
  const auto r = compute_cdf({6, 2.0, 0.4}, kExt, true);
  const auto rep = validate_identities(*r.trace, kExt);
  CHECK(rep.omega_identity <= 1e-9);
  CHECK(rep.quadratic <= 1e-9);
  CHECK(*rep.schlesinger_S <= 1e-5);
  CHECK(*rep.schlesinger_R <= 1e-5);
  CHECK(*rep.painleve_v <= 1e-5);
  CHECK(*rep.zeta_consistency <= 1e-5);
}

TEST_CASE("identity suite: derivative checks are skipped at t = 0") {
  const auto tr = build_trace({8, 1.0, 0.0}, kExt);
  const auto rep = validate_identities(tr, kExt);
  CHECK_FALSE(rep.schlesinger_S.has_value());
  CHECK_FALSE(rep.painleve_v.has_value());
  CHECK(rep.omega_identity < 1e-28);
}

TEST_CASE("sigma-form residual: exact zero and generic nonzero") {
  for (int N : {1, 5, 40}) {
    for (double t : {0.1, 1.0}) CHECK(p5_residual(-N * t, -N, 0.0, t, N, 0.0) == 0.0);
  }
  oracle::Gen g(99);
  int nonzero = 0;
  for (int i = 0; i < 50; ++i) {
    const double r = p5_residual(g.uniform(-5, 0), g.uniform(-5, 0), g.uniform(-5, 5),
                                 g.uniform(0.1, 2), 4, 1.0);
    nonzero += std::fabs(r) > 1e-6;
  }
  CHECK(nonzero >= 45);
  const auto r = compute_cdf({6, 2.0, 0.4}, kExt);
  auto H = [&](double t) { return compute_H({6, 2.0, t}, kExt); };
  const double h = 0.4 * 2e-3;
  CHECK(std::fabs(p5_residual(*r.H, oracle::d1(H, 0.4, h), oracle::d2(H, 0.4, h), 0.4, 6, 2.0)) <=
        1e-4);
}

TEST_CASE("property: F is a survival function in t") {
  oracle::Gen g(2024);
  for (int c = 0; c < 40; ++c) {
    const int N = g.integer(1, 80);
    const double a = g.uniform() < 0.3 ? double(g.integer(0, 4)) : g.uniform(0.0, 6.0);
    double prev = 1.0;
    for (int i = 1; i <= 25; ++i) {
      const double t = i * (3.0 / N) / 25.0 * 2.0;
      const auto r = compute_cdf({N, a, t}, kStd);
      CHECK(r.F >= 0.0);
      CHECK(r.F <= 1.0);
      CHECK(r.F <= prev * (1.0 + 1e-12));
      CHECK(*r.H <= 1e-12);
      prev = r.F;
    }
  }
}

TEST_CASE("property: recursion invariants along random traces") {
  oracle::Gen g(7);
  for (int c = 0; c < 30; ++c) {
    const int N = g.integer(1, 100);
    const double a = g.uniform(0.0, 5.0);
    // N t within the hard-edge scale, where the forward recursion is reliable
    const double t = g.log_uniform(1e-3, std::min(5.0, 50.0 / N));
    const auto tr = build_trace({N, a, t}, kStd);
    DoubleDouble sum(0.0);
    for (int k = 0; k <= N; ++k) {
      const auto& s = tr.states[k];
      CHECK(std::fabs(d(s.zeta + s.sum_S)) <= 1e-13 * std::max(1.0, std::fabs(d(s.zeta))));
      CHECK(std::fabs(d(s.zeta + sum)) <= 1e-10 * std::max(1.0, std::fabs(d(s.zeta))));
      if (k >= 1) CHECK(d(s.R) > 0.0);
      CHECK(std::isfinite(d(s.log_h)));
      sum += s.S;
    }
    CHECK(d(tr.states[0].R) == 0.0);
  }
}

TEST_CASE("property: standard and extended results agree") {
  oracle::Gen g(31);
  for (int c = 0; c < 25; ++c) {
    const int N = g.integer(1, 120);
    const double a = g.uniform(0.0, 4.0);
    const double t = g.log_uniform(1e-3, 3.0) / std::sqrt(double(N));
    const auto s = compute_cdf({N, a, t}, kStd);
    const auto e = compute_cdf({N, a, t}, kExt);
    CHECK(std::fabs(s.log_F - e.log_F) <= 1e-9 * std::max(1.0, std::fabs(e.log_F)));
  }
}
