#include "wshart/op_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "wshart/dense_lu.hpp"
#include "wshart/errors.hpp"
#include "wshart/painleve.hpp"
#include "wshart/special_functions.hpp"

namespace wshart {

void ModelParams::validate() const {
  if (N < 1) throw DomainError("N must be >= 1");
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("a must be finite and >= 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("t must be finite and >= 0");
}

template <class T>
std::vector<T> BasicRecurrenceTrace<T>::theta_all() const {
  std::vector<T> v(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) v[k] = theta(static_cast<int>(k));
  return v;
}

template <class T>
std::vector<T> BasicRecurrenceTrace<T>::omega_all() const {
  std::vector<T> v(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) v[k] = omega(static_cast<int>(k));
  return v;
}

template <class T>
BasicOPState<T> state_at_origin(int k, double a) {
  BasicOPState<T> s;
  s.k = k;
  const T A(a);
  const T kk(static_cast<double>(k));
  s.R = kk * (kk + A);
  s.S = T(2.0) * kk + A + 1.0;
  s.zeta = -s.R;
  s.sum_S = s.R;
  T s2(0.0), sr(0.0);
  for (int i = 0; i < k; ++i) {
    const T ii(static_cast<double>(i));
    const T Si = T(2.0) * ii + A + 1.0;
    s2 += Si * Si;
    sr += (ii + 1.0) * (ii + 1.0 + A);
  }
  s.sum_S2 = s2;
  s.sum_R = sr;
  s.log_h = sf::log_gamma(T(static_cast<double>(k)) + A + 1.0) +
            (k > 0 ? sf::log_gamma(T(static_cast<double>(k + 1))) : T(0.0));
  s.log_h_ratio = T(0.0);
  return s;
}

template <class T>
BasicOPState<T> init_state(double a, double t, const PrecisionContext& ctx) {
  if (!(a >= 0.0)) throw DomainError("init_state: a must be >= 0");
  if (!(t >= 0.0)) throw DomainError("init_state: t must be >= 0");
  if (t == 0.0) return state_at_origin<T>(0, a);
  const T nu = T(1.0) + a;
  const T tt(t);
  BasicOPState<T> s;
  s.k = 0;
  s.log_h = sf::log_upper_gamma(nu, tt, ctx.tolerance);
  s.S = math::exp(-tt + nu * math::log(tt) - s.log_h) + nu;
  s.R = T(0.0);
  s.zeta = T(0.0);
  s.sum_S = s.sum_S2 = s.sum_R = T(0.0);
  s.log_h_ratio = sf::log_regularized_upper_gamma(nu, tt, ctx.tolerance);
  s.theta = -math::exp(-tt + nu * math::log(tt) - s.log_h);
  return s;
}

template <class T>
BasicOPState<T> advance(const BasicOPState<T>& s, double a, double t, double r_floor) {
  // Summed relations with R = k(k+a) + rho, S = 2k+1+a - theta substituted;
  // the t = 0 parts cancel identically.
  const int k = s.k;
  const T kk(static_cast<double>(k));
  const T A(a);
  const T tt(t);
  const T sk = T(2.0) * kk + 1.0 + A;
  const T& th = s.theta;
  const T rho_n = -T(2.0) * s.sum_theta - s.rho + (T(2.0) * kk + A - tt) * th - th * th;
  const T k1t(static_cast<double>(k + 1));
  const T Q = k1t * (k1t + A);
  const T Rn = Q + rho_n;
  const double k1 = static_cast<double>(k + 1);
  if (!(to_double(Rn) > r_floor * k1 * k1)) {
    throw DegenerateRecursionError(
        "R_" + std::to_string(k + 1) + " = " + std::to_string(to_double(Rn)) +
            " is not positive; precision exhausted",
        k + 1);
  }
  const T sum_th = s.sum_theta + th;
  const T sum_sth = s.sum_s_theta + sk * th;
  const T sum_th2 = s.sum_theta2 + th * th;
  const T th_n = ((sk - tt) * rho_n - T(2.0) * s.sum_rho + T(2.0) * sum_sth - sum_th2 -
                  tt * sum_th) / Rn -
                 th;

  BasicOPState<T> n;
  n.k = k + 1;
  n.theta = th_n;
  n.rho = rho_n;
  n.sum_theta = sum_th;
  n.sum_s_theta = sum_sth;
  n.sum_theta2 = sum_th2;
  n.sum_rho = s.sum_rho + rho_n;
  n.R = Rn;
  n.S = sk + 2.0 - th_n;
  n.sum_S = Q - sum_th;
  n.zeta = -n.sum_S;
  n.sum_S2 = s.sum_S2 + s.S * s.S;
  n.sum_R = s.sum_R + Rn;
  n.log_h = s.log_h + math::log(Rn);
  n.log_h_ratio = s.log_h_ratio + math::log(Rn / Q);
  return n;
}

template <class T>
BasicRecurrenceTrace<T> build_trace(const ModelParams& p, const PrecisionContext& ctx,
                                    double r_floor) {
  p.validate();
  BasicRecurrenceTrace<T> tr;
  tr.params = p;
  tr.states.reserve(static_cast<std::size_t>(p.N) + 1);
  if (p.t == 0.0) {
    for (int k = 0; k <= p.N; ++k) tr.states.push_back(state_at_origin<T>(k, p.a));
    return tr;
  }
  tr.states.push_back(init_state<T>(p.a, p.t, ctx));
  for (int k = 0; k < p.N; ++k) tr.states.push_back(advance(tr.states.back(), p.a, p.t, r_floor));
  return tr;
}

namespace {

double safe_ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return den > 0.0 ? num / den : INFINITY;
}

// Magnitude of the roundoff floor carried by omega = -R - zeta at index k.
template <class T>
double omega_noise(const BasicRecurrenceTrace<T>& tr, int k) {
  const auto& s = tr.states[static_cast<std::size_t>(k)];
  return 64.0 * unit_roundoff<T>() * (k + 1) *
         (std::fabs(to_double(s.R)) + std::fabs(to_double(s.zeta)));
}

}  // namespace

template <class T>
double omega_identity_residual(const BasicRecurrenceTrace<T>& tr, int k) {
  const T w = tr.omega(k);
  const T rhs = tr.states[static_cast<std::size_t>(k)].R * tr.theta(k) * tr.theta(k - 1);
  const double lhs_d = to_double(w * w);
  const double noise = omega_noise(tr, k);
  const double den = std::max({std::fabs(lhs_d), std::fabs(to_double(rhs)), noise * noise});
  return safe_ratio(std::fabs(to_double(w * w - rhs)), den);
}

template <class T>
double quadratic_residual(const BasicRecurrenceTrace<T>& tr, int k) {
  const auto& s = tr.states[static_cast<std::size_t>(k)];
  const double a = tr.params.a;
  const T tt(tr.params.t);
  const T kk(static_cast<double>(k));
  const T th = tr.theta(k);
  const T w = tr.omega(k);
  const T t1 = w * w;
  const T t2 = th * (th - a - T(2.0) * kk + tt) * w;
  const T t3a = th * kk * tt * (kk + a);
  const T t3b = th * (th + tt) * s.zeta;
  const T res = t1 - t2 - t3a - t3b;
  const double noise = omega_noise(tr, k);
  const double den =
      std::max({std::fabs(to_double(t1)), std::fabs(to_double(t2)), std::fabs(to_double(t3a)),
                std::fabs(to_double(t3b)), noise * noise});
  return safe_ratio(std::fabs(to_double(res)), den);
}

namespace {

template <class T>
double max_algebraic_residual(const BasicRecurrenceTrace<T>& tr) {
  double worst = 0.0;
  for (int k = 1; k < static_cast<int>(tr.states.size()); ++k) {
    worst = std::max({worst, omega_identity_residual(tr, k), quadratic_residual(tr, k)});
  }
  return worst;
}

constexpr double kEscalationThreshold = 1e-7;

template <class T>
RecurrenceTrace widen(const BasicRecurrenceTrace<T>& tr) {
  if constexpr (std::is_same_v<T, DoubleDouble>) {
    return tr;
  } else {
    RecurrenceTrace out;
    out.params = tr.params;
    out.states.reserve(tr.states.size());
    for (const auto& s : tr.states) {
      OPState d;
      d.k = s.k;
      d.log_h = s.log_h;
      d.R = s.R;
      d.S = s.S;
      d.zeta = s.zeta;
      d.sum_S = s.sum_S;
      d.sum_S2 = s.sum_S2;
      d.sum_R = s.sum_R;
      d.log_h_ratio = s.log_h_ratio;
      d.theta = s.theta;
      d.rho = s.rho;
      d.sum_theta = s.sum_theta;
      d.sum_s_theta = s.sum_s_theta;
      d.sum_theta2 = s.sum_theta2;
      d.sum_rho = s.sum_rho;
      out.states.push_back(d);
    }
    return out;
  }
}

struct EscalatedTrace {
  RecurrenceTrace trace;
  PrecisionMode mode;
};

EscalatedTrace escalated_trace(const ModelParams& p, const PrecisionContext& ctx) {
  ctx.validate();
  p.validate();
  if (ctx.mode == PrecisionMode::standard && p.t > 0.0) {
    try {
      auto tr = build_trace<double>(p, ctx);
      if (max_algebraic_residual(tr) <= kEscalationThreshold) {
        return {widen(tr), PrecisionMode::standard};
      }
    } catch (const DegenerateRecursionError&) {
      // fall through to double-double
    }
  }
  auto tr = build_trace<DoubleDouble>(p, PrecisionContext::extended());
  if (p.t > 0.0) {
    const double r = max_algebraic_residual(tr);
    if (r > kEscalationThreshold) {
      throw PrecisionError("identity residual " + std::to_string(r) +
                           " exceeds 1e-7 even in extended precision");
    }
  }
  return {std::move(tr), p.t > 0.0 ? PrecisionMode::extended : ctx.mode};
}

DoubleDouble log_cdf_from_trace(const RecurrenceTrace& tr) {
  DoubleDouble s(0.0);
  for (int k = 0; k < tr.params.N; ++k) s += tr.states[static_cast<std::size_t>(k)].log_h_ratio;
  return s;
}

double H_from_trace(const RecurrenceTrace& tr) {
  return tr.states[static_cast<std::size_t>(tr.params.N)].sum_theta.to_double();
}

}  // namespace

RecurrenceTrace build_trace(const ModelParams& p, const PrecisionContext& ctx) {
  return escalated_trace(p, ctx).trace;
}

DistributionResult compute_cdf(const ModelParams& p, const PrecisionContext& ctx,
                               bool keep_trace) {
  auto et = escalated_trace(p, ctx);
  DistributionResult r;
  r.mode_used = et.mode;
  r.log_F = p.t == 0.0 ? 0.0 : log_cdf_from_trace(et.trace).to_double();
  if (r.log_F < std::log(std::numeric_limits<double>::min())) {
    r.F = 0.0;
    r.underflow = true;
  } else {
    r.F = std::exp(r.log_F);
  }
  r.H = p.t == 0.0 ? 0.0 : H_from_trace(et.trace);
  if (keep_trace) r.trace = std::move(et.trace);
  return r;
}

double compute_H(const ModelParams& p, const PrecisionContext& ctx) {
  if (p.t == 0.0) {
    p.validate();
    return 0.0;
  }
  return H_from_trace(escalated_trace(p, ctx).trace);
}

double pdf_smallest(const ModelParams& p, const PrecisionContext& ctx) {
  if (!(p.t > 0.0)) throw DomainError("pdf_smallest requires t > 0");
  const auto r = compute_cdf(p, ctx);
  return std::max(0.0, -r.F * *r.H / p.t);
}

double hankel_oracle_cdf(const ModelParams& p, const PrecisionContext& ctx) {
  p.validate();
  ctx.validate();
  const int max_n = ctx.mode == PrecisionMode::extended ? 30 : 12;
  if (p.N > max_n) {
    throw DomainError("hankel_oracle_cdf supports N <= " + std::to_string(max_n) + " in " +
                      to_string(ctx.mode) + " precision");
  }
  if (p.t == 0.0) return 1.0;
  const auto n = static_cast<std::size_t>(p.N);
  const DoubleDouble A(p.a);
  const DoubleDouble tt(p.t);
  // Row/column i scaled by Γ(2i+a+1)^{-1/2}; the scaling cancels in the ratio.
  std::vector<DoubleDouble> log_mu_t(2 * n - 1), log_mu_0(2 * n - 1);
  for (std::size_t m = 0; m < 2 * n - 1; ++m) {
    const DoubleDouble nu = A + static_cast<double>(m + 1);
    log_mu_t[m] = sf::log_upper_gamma(nu, tt, 1e-32);
    log_mu_0[m] = sf::log_gamma(nu);
  }
  std::vector<DoubleDouble> Mt(n * n), M0(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const DoubleDouble sc = (log_mu_0[2 * i] + log_mu_0[2 * j]) * 0.5;
      Mt[i * n + j] = exp(log_mu_t[i + j] - sc);
      M0[i * n + j] = exp(log_mu_0[i + j] - sc);
    }
  }
  const auto ft = lu_factor(Mt, n);
  const auto f0 = lu_factor(M0, n);
  const double kappa = std::max(condition_number_1(Mt, ft), condition_number_1(M0, f0));
  const double certified = 31.0 - std::log10(kappa);
  if (!(certified >= 8.0)) {
    throw ConditioningError("Hankel determinant retains only " + std::to_string(certified) +
                                " certified digits",
                            certified);
  }
  return (ft.determinant() / f0.determinant()).to_double();
}

IdentityReport validate_identities(const RecurrenceTrace& tr, const PrecisionContext& ctx) {
  ctx.validate();
  IdentityReport rep;
  const int N = tr.params.N;
  for (int k = 1; k <= N; ++k) {
    const double ri = omega_identity_residual(tr, k);
    const double rq = quadratic_residual(tr, k);
    if (ri > rep.omega_identity) {
      rep.omega_identity = ri;
      rep.omega_worst_k = k;
    }
    if (rq > rep.quadratic) {
      rep.quadratic = rq;
      rep.quadratic_worst_k = k;
    }
  }
  const double t = tr.params.t;
  if (!(t > 0.0)) return rep;

  const bool ext = ctx.mode == PrecisionMode::extended;
  const double h = t * (ext ? 2e-3 : 1e-2);
  std::array<RecurrenceTrace, 5> sh;
  for (int j = 0; j < 5; ++j) {
    ModelParams q = tr.params;
    q.t = t + (j - 2) * h;
    sh[static_cast<std::size_t>(j)] = (j == 2) ? tr : build_trace(q, ctx);
  }
  auto d1 = [&](auto&& get) {
    return (get(sh[0]) - 8.0 * get(sh[1]) + 8.0 * get(sh[3]) - get(sh[4])) / (12.0 * h);
  };
  auto d2 = [&](auto&& get) {
    return (-get(sh[0]) + 16.0 * get(sh[1]) - 30.0 * get(sh[2]) + 16.0 * get(sh[3]) -
            get(sh[4])) /
           (12.0 * h * h);
  };

  double rs = 0.0, rr = 0.0;
  for (int k = 0; k < N; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const double Sk = tr.states[ku].S.to_double();
    const double Rk = tr.states[ku].R.to_double();
    const double Rk1 = tr.states[ku + 1].R.to_double();
    const double Sk1 = tr.states[ku + 1].S.to_double();
    // Differences of nearby coefficients are formed in double-double first.
    const double lhs_s = (tr.states[ku].S - tr.states[ku + 1].R + tr.states[ku].R).to_double();
    const double dS = t * d1([&](const RecurrenceTrace& x) { return x.states[ku].S.to_double(); });
    const double den_s = std::max({std::fabs(Sk), std::fabs(Rk1), std::fabs(Rk), std::fabs(dS)});
    rs = std::max(rs, std::fabs(lhs_s - dS) / den_s);

    const double lhs_r = (DoubleDouble(2.0) - tr.states[ku + 1].S + tr.states[ku].S).to_double();
    const double dlogR =
        t * d1([&](const RecurrenceTrace& x) { return log(x.states[ku + 1].R).to_double(); });
    const double den_r = std::max({2.0, std::fabs(Sk1), std::fabs(Sk), std::fabs(dlogR)});
    rr = std::max(rr, std::fabs(lhs_r - dlogR) / den_r);
  }
  rep.schlesinger_S = rs;
  rep.schlesinger_R = rr;

  auto Hof = [&](const RecurrenceTrace& x) { return H_from_trace(x); };
  const double H = Hof(tr);
  const double Hp = d1(Hof);
  const double Hpp = d2(Hof);
  rep.painleve_v = p5_residual(H, Hp, Hpp, t, N, tr.params.a);

  auto logF = [&](const RecurrenceTrace& x) { return log_cdf_from_trace(x).to_double(); };
  const double H_fd = t * d1(logF);
  rep.zeta_consistency = std::fabs(H - H_fd) / std::max(1.0, std::fabs(H));
  return rep;
}

#define WSHART_INSTANTIATE(T)                                                             \
  template struct BasicRecurrenceTrace<T>;                                                \
  template BasicOPState<T> state_at_origin<T>(int, double);                               \
  template BasicOPState<T> init_state<T>(double, double, const PrecisionContext&);        \
  template BasicOPState<T> advance<T>(const BasicOPState<T>&, double, double, double);    \
  template BasicRecurrenceTrace<T> build_trace<T>(const ModelParams&, const PrecisionContext&, \
                                                  double);                                \
  template double omega_identity_residual<T>(const BasicRecurrenceTrace<T>&, int);       \
  template double quadratic_residual<T>(const BasicRecurrenceTrace<T>&, int);

WSHART_INSTANTIATE(double)
WSHART_INSTANTIATE(DoubleDouble)
#undef WSHART_INSTANTIATE

}  // namespace wshart
