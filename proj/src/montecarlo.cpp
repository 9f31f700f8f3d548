#include "wshart/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

#include "wshart/errors.hpp"
#include "wshart/philox.hpp"

namespace wshart {

void SamplerConfig::validate() const {
  if (N < 1) throw DomainError("sampler: N must be >= 1");
  if (M < N) throw DomainError("sampler: M must be >= N");
  if (n_samples < 1) throw DomainError("sampler: n_samples must be >= 1");
  if (n_streams < 1) throw DomainError("sampler: n_streams must be >= 1");
}

double EmpiricalCDF::survival(double t) const {
  if (samples.empty()) throw DomainError("empirical CDF is empty");
  const auto it = std::lower_bound(samples.begin(), samples.end(), t);
  return static_cast<double>(samples.end() - it) / static_cast<double>(samples.size());
}

void householder_bidiagonalize(int M, int N, std::vector<double>& re, std::vector<double>& im,
                               std::vector<double>& d, std::vector<double>& e) {
  const auto m = static_cast<std::size_t>(M);
  d.assign(static_cast<std::size_t>(N), 0.0);
  e.assign(N > 1 ? static_cast<std::size_t>(N - 1) : 0, 0.0);
  std::vector<double> sr(m), si(m), ur(static_cast<std::size_t>(N)), ui(static_cast<std::size_t>(N));
  auto at = [m](std::size_t i, std::size_t j) { return j * m + i; };

  for (std::size_t k = 0; k < static_cast<std::size_t>(N); ++k) {
    // Left reflector annihilating A[k+1:, k].
    double nrm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) nrm2 += re[at(i, k)] * re[at(i, k)] + im[at(i, k)] * im[at(i, k)];
    const double nrm = std::sqrt(nrm2);
    d[k] = nrm;
    if (nrm > 0.0) {
      const double x0r = re[at(k, k)], x0i = im[at(k, k)];
      const double a0 = std::hypot(x0r, x0i);
      const double pr = a0 > 0.0 ? x0r / a0 : 1.0, pi = a0 > 0.0 ? x0i / a0 : 0.0;
      // v = x with v_0 = phase (|x0| + ||x||); v^H v = 2 ||x|| (||x|| + |x0|).
      re[at(k, k)] = pr * (a0 + nrm);
      im[at(k, k)] = pi * (a0 + nrm);
      const double beta = 1.0 / (nrm * (nrm + a0));
      for (std::size_t j = k + 1; j < static_cast<std::size_t>(N); ++j) {
        double wr = 0.0, wi = 0.0;
        const double* vr = &re[at(k, k)];
        const double* vi = &im[at(k, k)];
        double* cr = &re[at(k, j)];
        double* ci = &im[at(k, j)];
        const std::size_t len = m - k;
        for (std::size_t i = 0; i < len; ++i) {
          wr += vr[i] * cr[i] + vi[i] * ci[i];
          wi += vr[i] * ci[i] - vi[i] * cr[i];
        }
        wr *= beta;
        wi *= beta;
        for (std::size_t i = 0; i < len; ++i) {
          cr[i] -= vr[i] * wr - vi[i] * wi;
          ci[i] -= vr[i] * wi + vi[i] * wr;
        }
      }
    }
    if (k + 1 >= static_cast<std::size_t>(N)) break;

    // Right reflector on row k, columns k+1.., built from conj(row).
    double rn2 = 0.0;
    for (std::size_t j = k + 1; j < static_cast<std::size_t>(N); ++j) {
      ur[j] = re[at(k, j)];
      ui[j] = -im[at(k, j)];
      rn2 += ur[j] * ur[j] + ui[j] * ui[j];
    }
    const double rn = std::sqrt(rn2);
    e[k] = rn;
    if (rn == 0.0 || k + 1 >= m) continue;
    const double z0 = std::hypot(ur[k + 1], ui[k + 1]);
    const double pr = z0 > 0.0 ? ur[k + 1] / z0 : 1.0, pi = z0 > 0.0 ? ui[k + 1] / z0 : 0.0;
    ur[k + 1] = pr * (z0 + rn);
    ui[k + 1] = pi * (z0 + rn);
    const double beta = 1.0 / (rn * (rn + z0));
    // s = A[k+1:, k+1:] u ; A -= beta s u^H
    const std::size_t r0 = k + 1, len = m - r0;
    std::fill(sr.begin(), sr.begin() + static_cast<std::ptrdiff_t>(len), 0.0);
    std::fill(si.begin(), si.begin() + static_cast<std::ptrdiff_t>(len), 0.0);
    for (std::size_t j = k + 1; j < static_cast<std::size_t>(N); ++j) {
      const double a = ur[j], b = ui[j];
      const double* cr = &re[at(r0, j)];
      const double* ci = &im[at(r0, j)];
      for (std::size_t i = 0; i < len; ++i) {
        sr[i] += cr[i] * a - ci[i] * b;
        si[i] += cr[i] * b + ci[i] * a;
      }
    }
    for (std::size_t j = k + 1; j < static_cast<std::size_t>(N); ++j) {
      const double a = beta * ur[j], b = -beta * ui[j];  // beta conj(u_j)
      double* cr = &re[at(r0, j)];
      double* ci = &im[at(r0, j)];
      for (std::size_t i = 0; i < len; ++i) {
        cr[i] -= sr[i] * a - si[i] * b;
        ci[i] -= sr[i] * b + si[i] * a;
      }
    }
  }
}

double bidiagonal_min_singular_value(const std::vector<double>& d, const std::vector<double>& e,
                                     double rel_tol) {
  const std::size_t n = d.size();
  if (n == 0 || e.size() + 1 != n) throw DomainError("bidiagonal: inconsistent sizes");
  // Off-diagonal of the 2n x 2n Golub-Kahan matrix: d0, e0, d1, e1, ..., d_{n-1}.
  std::vector<double> b2(2 * n - 1);
  double bmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    b2[2 * i] = d[i] * d[i];
    bmax = std::max(bmax, std::fabs(d[i]));
    if (i + 1 < n) {
      b2[2 * i + 1] = e[i] * e[i];
      bmax = std::max(bmax, std::fabs(e[i]));
    }
  }
  if (bmax == 0.0) return 0.0;
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, bmax * bmax);
  // Number of eigenvalues of the Golub-Kahan matrix below x.
  auto count_below = [&](double x) {
    double q = -x;
    std::size_t c = q < 0.0;
    for (double bb : b2) {
      if (std::fabs(q) < pivmin) q = -pivmin;
      q = -x - bb / q;
      c += q < 0.0;
    }
    return c;
  };
  // B e_1 = d_0 e_1 and e_n^T B = d_{n-1} e_n^T bound sigma_min from above.
  double hi = std::min(std::fabs(d.front()), std::fabs(d.back()));
  if (hi == 0.0) return 0.0;
  hi *= 1.0 + 1e-12;
  double lo = 0.0;
  for (int it = 0; it < 2000 && hi - lo > rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) > n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (!(hi - lo <= rel_tol * hi * 2.0 || hi - lo <= std::numeric_limits<double>::denorm_min())) {
    throw ConvergenceError("bidiagonal bisection did not converge");
  }
  return 0.5 * (lo + hi);
}

double sample_one(int N, int M, std::uint64_t seed, std::uint64_t index) {
  const auto m = static_cast<std::size_t>(M);
  const std::size_t cnt = m * static_cast<std::size_t>(N);
  std::vector<double> re(cnt), im(cnt);
  const auto key = Philox4x32::key_from_seed(seed);
  const auto ilo = static_cast<std::uint32_t>(index), ihi = static_cast<std::uint32_t>(index >> 32);
  for (std::size_t e = 0; e < cnt; ++e) {
    const auto r = Philox4x32::block({static_cast<std::uint32_t>(e), ilo, ihi, 0u}, key);
    const double u1 = uniform_open(r[0], r[1]);
    const double u2 = uniform_open(r[2], r[3]);
    // Box-Muller scaled to variance 1/2 per real component.
    const double rad = std::sqrt(-std::log(u1));
    re[e] = rad * std::cos(2.0 * M_PI * u2);
    im[e] = rad * std::sin(2.0 * M_PI * u2);
  }
  std::vector<double> d, ed;
  householder_bidiagonalize(M, N, re, im, d, ed);
  const double s = bidiagonal_min_singular_value(d, ed);
  return s * s;
}

EmpiricalCDF sample_min_eig(const SamplerConfig& cfg) {
  cfg.validate();
  EmpiricalCDF out;
  out.samples.resize(cfg.n_samples);
  const auto S = static_cast<std::uint64_t>(cfg.n_streams);
  std::vector<std::exception_ptr> errors(S);
  auto work = [&](std::uint64_t s) {
    try {
      const std::uint64_t b = cfg.n_samples * s / S, en = cfg.n_samples * (s + 1) / S;
      for (std::uint64_t i = b; i < en; ++i) out.samples[i] = sample_one(cfg.N, cfg.M, cfg.seed, i);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (S == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(S);
    for (std::uint64_t s = 0; s < S; ++s) pool.emplace_back(work, s);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::sort(out.samples.begin(), out.samples.end());
  return out;
}

double ks_distance(const EmpiricalCDF& emp, const std::function<double(double)>& exact_survival) {
  const std::size_t n = emp.n();
  if (n == 0) throw DomainError("ks_distance: empty sample");
  const double nd = static_cast<double>(n);
  double D = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double F = exact_survival(emp.samples[i]);
    D = std::max({D, std::fabs((nd - static_cast<double>(i)) / nd - F),
                  std::fabs((nd - static_cast<double>(i) - 1.0) / nd - F)});
  }
  return D;
}

std::vector<DiagnosticRow> correction_diagnostic(const EmpiricalCDF& emp, int N, double a,
                                                 const PIIISolution& p3,
                                                 const std::vector<double>& x_grid) {
  if (N < 1) throw DomainError("correction_diagnostic: N must be >= 1");
  const double n = static_cast<double>(emp.n());
  std::vector<DiagnosticRow> rows;
  rows.reserve(x_grid.size());
  for (double x : x_grid) {
    DiagnosticRow r;
    r.x = x;
    r.F_emp = emp.survival(x / N);
    const P3Point p = p3.at(x);
    r.F_inf = std::exp(p.log_F);
    r.prediction = 0.5 * a * p.f;
    r.flagged = r.F_emp * n < 50.0;
    if (r.F_emp > 0.0) {
      r.N_log_ratio = N * std::log(r.F_emp / r.F_inf);
      r.stderr_ = N * std::sqrt(r.F_emp * (1.0 - r.F_emp) / n) / r.F_emp;
    } else {
      r.N_log_ratio = std::numeric_limits<double>::quiet_NaN();
      r.stderr_ = std::numeric_limits<double>::infinity();
    }
    rows.push_back(r);
  }
  return rows;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(const unsigned char* b) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

}  // namespace

void write_sample_dump(const std::string& path, const SamplerConfig& cfg, const EmpiricalCDF& emp) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kDumpMagic, 8);
  put_u64(os, static_cast<std::uint64_t>(cfg.N));
  put_u64(os, static_cast<std::uint64_t>(cfg.M));
  put_u64(os, emp.n());
  put_u64(os, cfg.seed);
  char id[16] = {};
  std::strncpy(id, Philox4x32::name, sizeof id);
  os.write(id, 16);
  const char reserved[8] = {};
  os.write(reserved, 8);
  for (double v : emp.samples) put_u64(os, std::bit_cast<std::uint64_t>(v));
  if (!os) throw std::runtime_error("write failed: " + path);
}

EmpiricalCDF read_sample_dump(const std::string& path, SampleDumpHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  unsigned char h[64];
  is.read(reinterpret_cast<char*>(h), 64);
  if (!is || std::memcmp(h, kDumpMagic, 8) != 0) {
    throw std::runtime_error(path + " is not a sample dump (bad magic)");
  }
  SampleDumpHeader hd;
  hd.N = get_u64(h + 8);
  hd.M = get_u64(h + 16);
  hd.n = get_u64(h + 24);
  hd.seed = get_u64(h + 32);
  hd.rng_id.assign(reinterpret_cast<const char*>(h + 40), strnlen(reinterpret_cast<const char*>(h + 40), 16));
  EmpiricalCDF emp;
  emp.samples.resize(hd.n);
  unsigned char b[8];
  for (std::uint64_t i = 0; i < hd.n; ++i) {
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error(path + " is truncated");
    emp.samples[i] = std::bit_cast<double>(get_u64(b));
  }
  if (header) *header = hd;
  return emp;
}

void write_sample_csv(const std::string& path, const EmpiricalCDF& emp) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "sample\n";
  os.precision(17);
  for (double v : emp.samples) os << v << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace wshart
