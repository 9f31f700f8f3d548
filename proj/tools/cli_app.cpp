#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <variant>

#include "wshart/errors.hpp"
#include "wshart/limits.hpp"
#include "wshart/montecarlo.hpp"
#include "wshart/op_engine.hpp"
#include "wshart/painleve.hpp"
#include "wshart/philox.hpp"
#include "wshart/special_functions.hpp"

#ifndef WSHART_VERSION
#define WSHART_VERSION "0.0.0"
#endif

namespace wshart::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

void emit(const Table& t, const std::string& format, std::ostream& os) {
  if (format == "json") {
    nlohmann::ordered_json j;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) meta[k] = v;
    j["meta"] = meta;
    j["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      auto row = nlohmann::ordered_json::array();
      for (const auto& c : r) {
        if (const auto* d = std::get_if<double>(&c)) {
          if (std::isfinite(*d)) {
            row.push_back(*d);
          } else {
            row.push_back(nullptr);
          }
        } else if (const auto* i = std::get_if<long long>(&c)) {
          row.push_back(*i);
        } else {
          row.push_back(std::get<std::string>(c));
        }
      }
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << '\n';
    return;
  }
  for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_text(r[i]);
    os << '\n';
  }
}

struct Options {
  int N = 0;
  double a = 0.0;
  std::optional<double> ratio;
  std::optional<double> t;
  std::string t_grid;
  std::string x_grid;
  bool bessel = false;
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 0;
  std::uint64_t samples = 300000;
  int streams = 0;
  std::string precision;
  double A = 1.0;
  std::string dump;
  std::string dump_csv;
  double x_max = 0.0;
};

PrecisionContext resolve_precision(const Options& o) {
  std::string p = o.precision;
  if (p.empty()) {
    if (const char* env = std::getenv("WSHART_PRECISION"); env && *env) p = env;
  }
  if (p.empty()) return PrecisionContext::standard();
  try {
    return PrecisionContext::for_mode(parse_precision_mode(p));
  } catch (const DomainError& e) {
    throw UsageError(std::string("--precision: ") + e.what());
  }
}

std::vector<double> grid_or(const std::string& text, const std::string& fallback,
                            const char* flag) {
  try {
    return parse_grid(text.empty() ? fallback : text);
  } catch (const UsageError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

void base_meta(Table& t, const std::string& command, const std::vector<std::string>& args,
               const PrecisionContext& ctx) {
  std::string echo;
  for (std::size_t i = 1; i < args.size(); ++i) echo += (i > 1 ? " " : "") + args[i];
  t.meta.emplace_back("version", WSHART_VERSION);
  t.meta.emplace_back("command", command);
  t.meta.emplace_back("spec", echo);
  t.meta.emplace_back("precision", to_string(ctx.mode));
}

void require_N(const Options& o) {
  if (o.N < 1) throw UsageError("--N: must be a positive integer");
}
void require_a(const Options& o) {
  if (!(o.a >= 0.0) || !std::isfinite(o.a)) throw UsageError("--a: must be finite and >= 0");
}

// ------------------------------------------------------------------ commands

Table cmd_cdf(const Options& o, const PrecisionContext& ctx) {
  require_N(o);
  require_a(o);
  std::vector<double> ts;
  if (o.t && !o.t_grid.empty()) throw UsageError("--t and --t-grid are mutually exclusive");
  if (o.t) {
    if (!(*o.t >= 0.0)) throw UsageError("--t: must be >= 0");
    ts = {*o.t};
  } else {
    ts = grid_or(o.t_grid, "", "--t-grid");
  }
  if (ts.front() < 0.0) throw UsageError("--t-grid: values must be >= 0");
  Table t;
  t.columns = {"t", "F_N", "pdf", "H_N"};
  std::string modes = "standard";
  for (double tv : ts) {
    const auto r = compute_cdf({o.N, o.a, tv}, ctx);
    if (r.mode_used == PrecisionMode::extended) modes = "extended";
    double pdf;
    if (tv == 0.0) {
      pdf = o.a == 0.0 ? static_cast<double>(o.N) : 0.0;  // limits t -> 0+
    } else {
      pdf = std::max(0.0, -r.F * *r.H / tv);
    }
    t.rows.push_back({tv, r.F, pdf, *r.H});
  }
  t.meta.emplace_back("N", std::to_string(o.N));
  t.meta.emplace_back("a", fmt_double(o.a));
  t.meta.emplace_back("regime", "finite-N");
  t.meta.emplace_back("arithmetic_used", modes);
  return t;
}

Table cmd_limit(const Options& o) {
  require_a(o);
  const auto xs = grid_or(o.x_grid, "0:10:2001", "--x-grid");
  if (xs.front() < 0.0) throw UsageError("--x-grid: values must be >= 0");
  Table t;
  t.columns = {"x", "f", "F_inf"};
  if (o.bessel) {
    if (o.a != std::floor(o.a) || o.a > 10) {
      throw UsageError("--bessel: requires integer a in [0, 10]");
    }
    const int ai = static_cast<int>(o.a);
    const auto F = limiting_cdf_bessel(ai, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      t.rows.push_back({xs[i], bessel_det_f(ai, xs[i]), F[i]});
    }
    t.meta.emplace_back("route", "bessel-determinant");
  } else {
    const double xmax = xs.back() > 0.0 ? xs.back() : 1.0;
    if (xmax > 50.0) throw UsageError("--x-grid: hard-edge solve supports x <= 50");
    const auto p3 = solve_p3(o.a, xmax);
    for (double x : xs) {
      const auto p = p3.at(x);
      t.rows.push_back({x, p.f, std::exp(p.log_F)});
    }
    t.meta.emplace_back("route", "painleve-iii-ode");
    t.meta.emplace_back("x_launch", fmt_double(p3.x_launch));
  }
  t.meta.emplace_back("a", fmt_double(o.a));
  t.meta.emplace_back("regime", "hard-edge");
  return t;
}

Table cmd_correction(const Options& o, const PrecisionContext& ctx) {
  require_N(o);
  require_a(o);
  if (classify_regime(o.N, o.a) != Regime::hard_edge) {
    throw UsageError("--a: correction applies to the hard edge only");
  }
  const auto xs = grid_or(o.x_grid, "0:5:51", "--x-grid");
  if (xs.front() < 0.0) throw UsageError("--x-grid: values must be >= 0");
  const double xmax = xs.back() > 0.0 ? xs.back() : 1.0;
  if (xmax > 50.0) throw UsageError("--x-grid: hard-edge solve supports x <= 50");
  const auto p3 = solve_p3(o.a, xmax);
  Table t;
  t.columns = {"x", "F_inf", "F_N_corrected", "F_N_exact", "diff_times_N"};
  for (double x : xs) {
    const auto c = corrected_cdf(p3, o.N, x);
    const double exact = compute_cdf({o.N, o.a, x / o.N}, ctx).F;
    t.rows.push_back({x, c.F_inf, c.additive, exact, o.N * (exact - c.additive)});
  }
  t.meta.emplace_back("N", std::to_string(o.N));
  t.meta.emplace_back("a", fmt_double(o.a));
  t.meta.emplace_back("regime", "hard-edge");
  t.meta.emplace_back("corrected_form", "F_inf + (a/2N) f F_inf");
  return t;
}

Table cmd_softedge(const Options& o) {
  if (o.ratio && !(*o.ratio > 0.0)) throw UsageError("--ratio: must be > 0");
  const auto xs = grid_or(o.x_grid, "-8:8:161", "--x-grid");
  if (xs.front() < -8.0 || xs.back() > 10.0) {
    throw UsageError("--x-grid: soft-edge grid must lie in [-8, 10]");
  }
  PIIConfig cfg;
  cfg.x_max = std::max(8.0, std::min(10.0, xs.back()));
  auto p2 = solve_p2_hastings_mcleod(cfg);
  H1Config hc;
  hc.amplitude = o.A;
  solve_h1_correction(p2, hc);
  Table t;
  t.columns = {"x", "F2", "h0_tilde", "h1_tilde"};
  for (double x : xs) {
    t.rows.push_back({x, tw2_cdf(p2, x), h0_tilde(p2, x), h1_at(p2, x).h1});
  }
  t.meta.emplace_back("regime", "soft-edge");
  t.meta.emplace_back("h1_amplitude_convention", p2.h1_amplitude_convention);
  if (o.ratio) {
    const auto sp = soft_edge_params(*o.ratio);
    t.meta.emplace_back("ratio", fmt_double(sp.ratio));
    t.meta.emplace_back("x_minus", fmt_double(sp.x_minus));
    t.meta.emplace_back("x_plus", fmt_double(sp.x_plus));
    t.meta.emplace_back("m", fmt_double(sp.m));
    if (o.N > 0) {
      t.columns.push_back("t");
      for (auto& r : t.rows) r.push_back(soft_edge_location(o.N, sp, std::get<double>(r[0])));
    }
  }
  for (const auto& w : p2.warnings) t.meta.emplace_back("warning", w);
  return t;
}

Table cmd_mc(const Options& o) {
  require_N(o);
  require_a(o);
  if (o.a != std::floor(o.a)) throw UsageError("--a: Monte Carlo needs integer a (M = N + a)");
  if (o.samples < 1) throw UsageError("--samples: must be >= 1");
  SamplerConfig cfg;
  cfg.N = o.N;
  cfg.M = o.N + static_cast<int>(o.a);
  cfg.n_samples = o.samples;
  cfg.seed = o.seed;
  cfg.n_streams = o.streams > 0 ? o.streams
                                : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (o.streams < 0) throw UsageError("--streams: must be >= 1");
  const auto emp = sample_min_eig(cfg);
  if (!o.dump.empty()) write_sample_dump(o.dump, cfg, emp);
  if (!o.dump_csv.empty()) write_sample_csv(o.dump_csv, emp);

  const auto xs = grid_or(o.x_grid, "0.5:3:6", "--x-grid");
  if (xs.front() < 0.0) throw UsageError("--x-grid: values must be >= 0");
  const auto p3 = solve_p3(o.a, std::max(xs.back(), 1.0));
  const auto rows = correction_diagnostic(emp, o.N, o.a, p3, xs);
  const auto ctx = PrecisionContext::standard();
  const double ks =
      ks_distance(emp, [&](double t) { return compute_cdf({o.N, o.a, t}, ctx).F; });

  Table t;
  t.columns = {"x", "F_emp", "F_inf", "N_log_ratio", "prediction", "stderr", "flagged"};
  for (const auto& r : rows) {
    t.rows.push_back({r.x, r.F_emp, r.F_inf, r.N_log_ratio, r.prediction, r.stderr_,
                      static_cast<long long>(r.flagged)});
  }
  t.meta.emplace_back("N", std::to_string(cfg.N));
  t.meta.emplace_back("M", std::to_string(cfg.M));
  t.meta.emplace_back("a", fmt_double(o.a));
  t.meta.emplace_back("samples", std::to_string(cfg.n_samples));
  t.meta.emplace_back("seed", std::to_string(cfg.seed));
  t.meta.emplace_back("rng", Philox4x32::name);
  t.meta.emplace_back("ks_distance", fmt_double(ks));
  t.meta.emplace_back("regime", "hard-edge");
  return t;
}

Table cmd_verify(const Options& o, const PrecisionContext& ctx, bool& all_pass) {
  require_N(o);
  require_a(o);
  if (!o.t || !(*o.t > 0.0)) throw UsageError("--t: verify needs t > 0");
  const ModelParams p{o.N, o.a, *o.t};
  Table t;
  t.columns = {"check", "value", "threshold", "pass"};
  all_pass = true;
  auto add = [&](const std::string& name, double v, double thr) {
    const bool ok = v <= thr;
    all_pass = all_pass && ok;
    t.rows.push_back({name, v, thr, static_cast<long long>(ok)});
  };
  const auto r = compute_cdf(p, ctx, true);
  const auto rep = validate_identities(*r.trace, ctx);
  add("omega_identity", rep.omega_identity, 1e-9);
  add("quadratic_relation", rep.quadratic, 1e-9);
  add("schlesinger_S", *rep.schlesinger_S, 1e-4);
  add("schlesinger_R", *rep.schlesinger_R, 1e-4);
  add("painleve_v_sigma", *rep.painleve_v, 1e-4);
  add("zeta_consistency", *rep.zeta_consistency, 1e-5);
  if (o.N <= 12) {
    const double h = hankel_oracle_cdf(p, ctx);
    add("hankel_oracle_rel", std::fabs(r.F - h) / h, 1e-8);
  }
  if (o.a == 0.0) add("exact_law_a0", std::fabs(r.F - std::exp(-o.N * *o.t)), 1e-10);
  t.meta.emplace_back("N", std::to_string(o.N));
  t.meta.emplace_back("a", fmt_double(o.a));
  t.meta.emplace_back("t", fmt_double(*o.t));
  t.meta.emplace_back("arithmetic_used", to_string(r.mode_used));
  t.meta.emplace_back("result", all_pass ? "PASS" : "FAIL");
  return t;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("grid must be start:stop:count, got '" + text + "'");
  double a, b;
  long long n;
  try {
    std::size_t pos;
    a = std::stod(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument("start");
    b = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument("stop");
    n = std::stoll(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument("count");
  } catch (const std::exception&) {
    throw UsageError("grid must be start:stop:count with numeric fields, got '" + text + "'");
  }
  if (!std::isfinite(a) || !std::isfinite(b)) throw UsageError("grid endpoints must be finite");
  if (n < 1) throw UsageError("grid count must be >= 1");
  if (n == 1) {
    if (a != b) throw UsageError("grid with count 1 needs start == stop");
    return {a};
  }
  if (!(b > a)) throw UsageError("grid must be strictly increasing (stop > start)");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  g.back() = b;
  return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Smallest-eigenvalue distribution of complex Wishart matrices", "wshart"};
  app.set_version_flag("--version", WSHART_VERSION);
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sc) {
    sc->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sc->add_option("--out", o.out, "Write output to PATH instead of stdout");
    sc->add_option("--precision", o.precision,
                   "standard | extended (overrides WSHART_PRECISION)");
  };

  auto* cdf = app.add_subcommand("cdf", "F_N(t), density and H_N on a t grid");
  cdf->add_option("--N", o.N, "Matrix size")->required();
  cdf->add_option("--a", o.a, "Laguerre exponent a = M - N");
  cdf->add_option("--t", o.t, "Single evaluation point");
  cdf->add_option("--t-grid", o.t_grid, "start:stop:count");
  add_common(cdf);

  auto* limit = app.add_subcommand("limit", "Hard-edge f(x) and F_inf(x)");
  limit->add_option("--a", o.a, "Laguerre exponent")->required();
  limit->add_option("--x-grid", o.x_grid, "start:stop:count (default 0:10:2001)");
  limit->add_flag("--bessel", o.bessel, "Use the Bessel-determinant closed form (integer a)");
  add_common(limit);

  auto* corr = app.add_subcommand("correction", "Exact F_N(x/N) against the 1/N-corrected limit");
  corr->add_option("--N", o.N, "Matrix size")->required();
  corr->add_option("--a", o.a, "Laguerre exponent")->required();
  corr->add_option("--x-grid", o.x_grid, "start:stop:count (default 0:5:51)");
  add_common(corr);

  auto* soft = app.add_subcommand("softedge", "Tracy-Widom F2, h0 and the h1 correction");
  soft->add_option("--ratio", o.ratio, "a/N; adds edge constants (and t with --N)");
  soft->add_option("--N", o.N, "Matrix size, for the t column");
  soft->add_option("--x-grid", o.x_grid, "start:stop:count within [-8, 10] (default -8:8:161)");
  soft->add_option("--A", o.A, "Amplitude of h1 (not fixed by theory; default 1)");
  add_common(soft);

  auto* mc = app.add_subcommand("mc", "Monte Carlo sampling of lambda_min with diagnostics");
  mc->add_option("--N", o.N, "Matrix size")->required();
  mc->add_option("--a", o.a, "Integer a = M - N")->required();
  mc->add_option("--samples", o.samples, "Number of matrices (default 300000)");
  mc->add_option("--seed", o.seed, "64-bit seed (default 0)");
  mc->add_option("--streams", o.streams, "Parallel streams (default: hardware threads)");
  mc->add_option("--x-grid", o.x_grid, "Diagnostic grid (default 0.5:3:6)");
  mc->add_option("--dump", o.dump, "Binary sample dump path");
  mc->add_option("--dump-csv", o.dump_csv, "CSV sample export path");
  add_common(mc);

  auto* verify = app.add_subcommand("verify", "Identity and oracle suite with pass/fail summary");
  verify->add_option("--N", o.N, "Matrix size")->required();
  verify->add_option("--a", o.a, "Laguerre exponent")->required();
  verify->add_option("--t", o.t, "Evaluation point (> 0)")->required();
  add_common(verify);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << WSHART_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const PrecisionContext ctx = resolve_precision(o);
    Table t;
    int code = 0;
    if (command == "cdf") {
      t = cmd_cdf(o, ctx);
    } else if (command == "limit") {
      t = cmd_limit(o);
    } else if (command == "correction") {
      t = cmd_correction(o, ctx);
    } else if (command == "softedge") {
      t = cmd_softedge(o);
    } else if (command == "mc") {
      t = cmd_mc(o);
    } else {
      bool pass = true;
      t = cmd_verify(o, ctx, pass);
      code = pass ? 0 : 1;
    }
    Table full;
    base_meta(full, command, args, ctx);
    full.meta.insert(full.meta.end(), t.meta.begin(), t.meta.end());
    full.columns = std::move(t.columns);
    full.rows = std::move(t.rows);
    if (o.out.empty()) {
      emit(full, o.format, out);
    } else {
      std::ofstream f(o.out, std::ios::trunc);
      if (!f) {
        err << "usage error: --out: cannot open '" << o.out << "'\n";
        return 2;
      }
      emit(full, o.format, f);
    }
    if (code != 0) err << command << ": one or more checks failed\n";
    return code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << command << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace wshart::cli
