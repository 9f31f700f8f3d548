#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wshart/errors.hpp"
#include "wshart/limits.hpp"
#include "wshart/montecarlo.hpp"
#include "wshart/op_engine.hpp"
#include "wshart/painleve.hpp"
#include "wshart/philox.hpp"
#include "wshart/special_functions.hpp"

namespace py = pybind11;
using namespace wshart;

namespace {

PrecisionContext ctx_for(const std::string& precision) {
  return PrecisionContext::for_mode(parse_precision_mode(precision));
}

py::dict identity_dict(const IdentityReport& r) {
  py::dict d;
  d["omega_identity"] = r.omega_identity;
  d["quadratic"] = r.quadratic;
  d["schlesinger_S"] = r.schlesinger_S;
  d["schlesinger_R"] = r.schlesinger_R;
  d["painleve_v"] = r.painleve_v;
  d["zeta_consistency"] = r.zeta_consistency;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Smallest-eigenvalue distribution of complex Wishart matrices";

  auto base = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PrecisionError>(m, "PrecisionError", PyExc_ArithmeticError);
  py::register_exception<DegenerateRecursionError>(m, "DegenerateRecursionError",
                                                   PyExc_ArithmeticError);
  py::register_exception<ConditioningError>(m, "ConditioningError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<GridError>(m, "GridError", PyExc_IndexError);
  (void)base;

  // special functions
  m.def("log_gamma", [](double x, const std::string& p) { return log_gamma(x, ctx_for(p)); },
        py::arg("x"), py::arg("precision") = "standard");
  m.def("upper_incomplete_gamma",
        [](double nu, double x, const std::string& p) {
          return upper_incomplete_gamma(nu, x, ctx_for(p));
        },
        py::arg("nu"), py::arg("x"), py::arg("precision") = "standard");
  m.def("bessel_i", [](int n, double x, const std::string& p) { return bessel_i(n, x, ctx_for(p)); },
        py::arg("n"), py::arg("x"), py::arg("precision") = "standard");
  m.def("airy_ai", [](double x) { return airy_ai(x); }, py::arg("x"));

  // finite N
  m.def(
      "compute_cdf",
      [](int N, double a, double t, const std::string& p) {
        const auto r = compute_cdf({N, a, t}, ctx_for(p));
        py::dict d;
        d["F"] = r.F;
        d["log_F"] = r.log_F;
        d["H"] = r.H;
        d["underflow"] = r.underflow;
        d["mode_used"] = to_string(r.mode_used);
        return d;
      },
      py::arg("N"), py::arg("a"), py::arg("t"), py::arg("precision") = "standard");
  m.def("compute_H", [](int N, double a, double t, const std::string& p) {
    return compute_H({N, a, t}, ctx_for(p));
  }, py::arg("N"), py::arg("a"), py::arg("t"), py::arg("precision") = "standard");
  m.def("pdf_smallest", [](int N, double a, double t, const std::string& p) {
    return pdf_smallest({N, a, t}, ctx_for(p));
  }, py::arg("N"), py::arg("a"), py::arg("t"), py::arg("precision") = "standard");
  m.def("hankel_oracle_cdf", [](int N, double a, double t, const std::string& p) {
    return hankel_oracle_cdf({N, a, t}, ctx_for(p));
  }, py::arg("N"), py::arg("a"), py::arg("t"), py::arg("precision") = "standard");
  m.def("validate_identities", [](int N, double a, double t, const std::string& p) {
    const auto ctx = ctx_for(p);
    return identity_dict(validate_identities(build_trace({N, a, t}, ctx), ctx));
  }, py::arg("N"), py::arg("a"), py::arg("t"), py::arg("precision") = "extended");

  // hard edge
  py::class_<PIIISolution>(m, "PIIISolution")
      .def_readonly("a", &PIIISolution::a)
      .def_readonly("x_max", &PIIISolution::x_max)
      .def_readonly("grid", &PIIISolution::grid)
      .def_readonly("f", &PIIISolution::f)
      .def_readonly("f_prime", &PIIISolution::f_prime)
      .def_readonly("f_doubleprime", &PIIISolution::f_doubleprime)
      .def("f_at", [](const PIIISolution& s, double x) { return s.at(x).f; })
      .def("limiting_cdf", [](const PIIISolution& s, double x) { return limiting_cdf(s, x); });
  m.def("solve_p3", [](double a, double x_max, double rtol, double atol, int grid_points) {
    ODESolverConfig c;
    c.rtol = rtol;
    c.atol = atol;
    c.grid_points = grid_points;
    return solve_p3(a, x_max, c);
  }, py::arg("a"), py::arg("x_max"), py::arg("rtol") = 1e-10, py::arg("atol") = 1e-12,
     py::arg("grid_points") = 2001);
  m.def("bessel_det_f", [](int a, double x) { return bessel_det_f(a, x); }, py::arg("a"),
        py::arg("x"));
  m.def("corrected_cdf", [](const PIIISolution& s, int N, double x) {
    const auto c = corrected_cdf(s, N, x);
    return py::make_tuple(c.F_inf, c.additive, c.exponential);
  }, py::arg("p3"), py::arg("N"), py::arg("x"));

  // soft edge
  py::class_<PIISolution>(m, "PIISolution")
      .def_readonly("grid", &PIISolution::grid)
      .def_readonly("q", &PIISolution::q)
      .def_readonly("q_prime", &PIISolution::q_prime)
      .def_readonly("h0_tilde", &PIISolution::h0_tilde)
      .def_readonly("h1_tilde", &PIISolution::h1_tilde)
      .def_readonly("h1_amplitude_convention", &PIISolution::h1_amplitude_convention)
      .def("q_at", &PIISolution::q_at)
      .def("h0_tilde_at", [](const PIISolution& s, double x) { return h0_tilde(s, x); })
      .def("h1_tilde_at", [](const PIISolution& s, double x) { return h1_at(s, x).h1; })
      .def("tw2_cdf", [](const PIISolution& s, double x) { return tw2_cdf(s, x); });
  m.def("solve_p2_hastings_mcleod", [](double amplitude) {
    PIISolution s = solve_p2_hastings_mcleod();
    H1Config c;
    c.amplitude = amplitude;
    solve_h1_correction(s, c);
    return s;
  }, py::arg("amplitude") = 1.0);
  m.def("soft_edge_params", [](double ratio) {
    const auto p = soft_edge_params(ratio);
    py::dict d;
    d["ratio"] = p.ratio;
    d["x_minus"] = p.x_minus;
    d["x_plus"] = p.x_plus;
    d["m"] = p.m;
    return d;
  }, py::arg("ratio"));
  m.def("mp_density", &mp_density, py::arg("x"), py::arg("c"));

  // sampling
  m.def("sample_min_eig", [](int N, int M, std::uint64_t n, std::uint64_t seed, int streams) {
    SamplerConfig c;
    c.N = N;
    c.M = M;
    c.n_samples = n;
    c.seed = seed;
    c.n_streams = streams;
    py::gil_scoped_release release;
    return sample_min_eig(c).samples;
  }, py::arg("N"), py::arg("M"), py::arg("n_samples"), py::arg("seed") = 0,
     py::arg("n_streams") = 1);
  m.attr("rng_id") = Philox4x32::name;
}
