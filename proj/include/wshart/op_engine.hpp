#pragma once

#include <optional>
#include <vector>

#include "wshart/double_double.hpp"
#include "wshart/precision.hpp"

namespace wshart {

/// Matrix size N, Laguerre exponent a = M - N, evaluation point t.
struct ModelParams {
  int N = 1;
  double a = 0.0;
  double t = 0.0;

  /// Throws DomainError unless N >= 1, a >= 0, t >= 0 (all finite).
  void validate() const;
};

/// Recurrence coefficients of the monic polynomials orthogonal under
/// e^{-x} x^a on [t, inf) at index k, with the running sums consumed by the
/// summed forward relations.
///   sum_S  = sum_{i<k} S_i       (so zeta = -sum_S)
///   sum_S2 = sum_{i<k} S_i^2
///   sum_R  = sum_{i=1..k} R_i
///   log_h_ratio = log(h_k(t) / h_k(0))
/// The recursion itself runs on deviations from the t = 0 table, which stay
/// relatively accurate when t^{a+1} is tiny:
///   theta = 2k+1+a - S_k,  rho = R_k - k(k+a)
///   sum_theta = sum_{i<k} theta_i   (H_N = sum_theta at k = N)
///   sum_s_theta = sum_{i<k} (2i+1+a) theta_i,  sum_theta2 = sum_{i<k} theta_i^2
///   sum_rho = sum_{i=1..k} rho_i
template <class T>
struct BasicOPState {
  int k = 0;
  T log_h{};
  T R{};
  T S{};
  T zeta{};
  T sum_S{};
  T sum_S2{};
  T sum_R{};
  T log_h_ratio{};
  T theta{};
  T rho{};
  T sum_theta{};
  T sum_s_theta{};
  T sum_theta2{};
  T sum_rho{};
};

using OPState = BasicOPState<DoubleDouble>;

/// States for k = 0..N.
template <class T>
struct BasicRecurrenceTrace {
  ModelParams params;
  std::vector<BasicOPState<T>> states;

  T theta(int k) const { return states.at(static_cast<std::size_t>(k)).theta; }
  /// omega = -R - zeta, formed from deviations without cancellation.
  T omega(int k) const {
    const auto& s = states.at(static_cast<std::size_t>(k));
    return -s.rho - s.sum_theta;
  }
  std::vector<T> theta_all() const;
  std::vector<T> omega_all() const;
};

using RecurrenceTrace = BasicRecurrenceTrace<DoubleDouble>;

struct DistributionResult {
  double F = 1.0;
  double log_F = 0.0;
  std::optional<double> H;
  std::optional<RecurrenceTrace> trace;
  bool underflow = false;            // log_F below the smallest normal double
  PrecisionMode mode_used = PrecisionMode::standard;
};

/// Maximum residuals of the identity suite. Entries that could not be
/// evaluated (t = 0 for derivative-based checks) are left empty.
struct IdentityReport {
  double omega_identity = 0.0;  // omega_k^2 = R_k theta_k theta_{k-1}, k >= 1
  double quadratic = 0.0;       // quadratic relation between omega, theta, zeta
  int omega_worst_k = 0;
  int quadratic_worst_k = 0;
  std::optional<double> schlesinger_S;  // S_k - R_{k+1} + R_k = t dS_k/dt
  std::optional<double> schlesinger_R;  // 2 - S_{k+1} + S_k = t d log R_{k+1}/dt
  std::optional<double> painleve_v;     // sigma-form residual of H_N
  std::optional<double> zeta_consistency;
};

/// k = 0 state. r-coefficients follow from Γ(1+a, t).
template <class T>
BasicOPState<T> init_state(double a, double t, const PrecisionContext& ctx);

/// One step k -> k+1 of the summed forward relations. Throws
/// DegenerateRecursionError when R_{k+1} <= r_floor * (k+1)^2.
template <class T>
BasicOPState<T> advance(const BasicOPState<T>& s, double a, double t, double r_floor = 0.0);

/// Closed-form states at t = 0: R_k = k(k+a), S_k = 2k+a+1.
template <class T>
BasicOPState<T> state_at_origin(int k, double a);

/// States k = 0..N computed in arithmetic T (no escalation).
template <class T>
BasicRecurrenceTrace<T> build_trace(const ModelParams& p, const PrecisionContext& ctx,
                                    double r_floor = 0.0);

/// Trace in the precision chosen by the escalation policy.
RecurrenceTrace build_trace(const ModelParams& p, const PrecisionContext& ctx);

/// F_N(t) = Prob(lambda_min >= t). Standard mode runs in double and escalates
/// to double-double when R goes non-positive or the algebraic identities
/// drift past 1e-7; extended mode runs double-double directly.
DistributionResult compute_cdf(const ModelParams& p, const PrecisionContext& ctx,
                               bool keep_trace = false);

/// H_N = t d/dt log F_N = N(N+a) + zeta_N.
double compute_H(const ModelParams& p, const PrecisionContext& ctx);

/// Density of lambda_min: -F_N H_N / t.
double pdf_smallest(const ModelParams& p, const PrecisionContext& ctx);

/// Ratio of Hankel determinants of truncated moments Γ(m+a+1, t), evaluated
/// by pivoted elimination in double-double. Throws ConditioningError when
/// fewer than 8 digits survive.
double hankel_oracle_cdf(const ModelParams& p, const PrecisionContext& ctx);

/// Algebraic identities on the stored trace; Schlesinger, sigma-form and zeta
/// checks re-run the recursion at t +- h, t +- 2h (5-point stencils).
IdentityReport validate_identities(const RecurrenceTrace& trace, const PrecisionContext& ctx);

/// Relative residuals at a single index; exposed for tests.
template <class T>
double omega_identity_residual(const BasicRecurrenceTrace<T>& tr, int k);
template <class T>
double quadratic_residual(const BasicRecurrenceTrace<T>& tr, int k);

}  // namespace wshart
