#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wshart/painleve.hpp"

namespace wshart {

struct SamplerConfig {
  int N = 1;
  int M = 1;  // a = M - N
  std::uint64_t n_samples = 1;
  std::uint64_t seed = 0;
  int n_streams = 1;

  void validate() const;
};

/// Ascending samples of lambda_min.
struct EmpiricalCDF {
  std::vector<double> samples;

  std::size_t n() const { return samples.size(); }
  /// (# samples >= t) / n.
  double survival(double t) const;
};

/// lambda_min of one complex Wishart matrix X^dagger X, X of size M x N with
/// entries of density pi^{-1} exp(-|z|^2). Pure function of (seed, index).
double sample_one(int N, int M, std::uint64_t seed, std::uint64_t index);

/// Draws cfg.n_samples smallest eigenvalues. Each stream owns a contiguous
/// slice of sample indices; the merged result does not depend on n_streams.
EmpiricalCDF sample_min_eig(const SamplerConfig& cfg);

/// Smallest singular value of the upper bidiagonal matrix with diagonal d and
/// superdiagonal e (size d.size() - 1), by bisection on the Golub-Kahan
/// tridiagonal with Sturm counts. Relative accuracy ~ rel_tol.
double bidiagonal_min_singular_value(const std::vector<double>& d, const std::vector<double>& e,
                                     double rel_tol = 1e-13);

/// Magnitudes of the bidiagonal produced by complex Householder reduction of
/// the column-major M x N matrix (re, im); inputs are overwritten.
void householder_bidiagonalize(int M, int N, std::vector<double>& re, std::vector<double>& im,
                               std::vector<double>& d, std::vector<double>& e);

/// One-sample Kolmogorov-Smirnov distance between the empirical survival
/// function and `exact_survival`.
double ks_distance(const EmpiricalCDF& emp, const std::function<double(double)>& exact_survival);

struct DiagnosticRow {
  double x = 0.0;
  double F_emp = 0.0;
  double F_inf = 0.0;
  double N_log_ratio = 0.0;  // N log(F_emp(x/N) / F_inf(x))
  double prediction = 0.0;   // (a/2) f(x)
  double stderr_ = 0.0;      // binomial error propagated through the log
  bool flagged = false;      // fewer than 50 samples beyond x/N
};

std::vector<DiagnosticRow> correction_diagnostic(const EmpiricalCDF& emp, int N, double a,
                                                 const PIIISolution& p3,
                                                 const std::vector<double>& x_grid);

// Sample dump: 64-byte header then n little-endian float64 values.
struct SampleDumpHeader {
  std::uint64_t N = 0, M = 0, n = 0, seed = 0;
  std::string rng_id;
};

inline constexpr char kDumpMagic[9] = "WSHMIN01";

void write_sample_dump(const std::string& path, const SamplerConfig& cfg, const EmpiricalCDF& emp);
EmpiricalCDF read_sample_dump(const std::string& path, SampleDumpHeader* header = nullptr);
void write_sample_csv(const std::string& path, const EmpiricalCDF& emp);

}  // namespace wshart
