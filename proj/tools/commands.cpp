#include "commands.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <Eigen/Core>

#include "stark/airy.hpp"
#include "stark/asympt.hpp"
#include "stark/determinant.hpp"
#include "stark/parallel.hpp"
#include "stark/potential.hpp"
#include "stark/roots.hpp"
#include "stark/smatrix.hpp"

#ifndef STARK_VERSION
#define STARK_VERSION "0.0.0"
#endif

namespace stark::cli {

using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct Writer {
  const RunConfig& cfg;
  std::vector<std::string> paths;

  std::string path(const std::string& suffix) const {
    const std::string prefix = cfg.output.prefix.empty() ? cfg.task.command : cfg.output.prefix;
    return (std::filesystem::path(cfg.output.dir) / (prefix + suffix)).string();
  }
  void write(const std::string& suffix, const std::string& body) {
    std::filesystem::create_directories(cfg.output.dir);
    const std::string p = path(suffix);
    std::ofstream(p, std::ios::binary) << body;
    paths.push_back(p);
  }
};

std::string plotdata(const std::string& xlabel, const std::string& ylabel, const std::vector<double>& x,
                     const std::vector<double>& y) {
  std::string s = "# " + xlabel + " " + ylabel + "\n";
  for (std::size_t i = 0; i < x.size(); ++i) s += num(x[i]) + " " + num(y[i]) + "\n";
  return s;
}

// --- resonances -------------------------------------------------------------

int cmd_resonances(const RunConfig& cfg, Writer& w, json& summary, std::ostream& out) {
  const TaskConfig& T = cfg.task;
  ResonanceOptions opt;
  opt.mode = T.mode;
  opt.tol = cfg.solver.tol;
  opt.max_iter = cfg.solver.max_iter;
  opt.multiplicity = T.multiplicity;
  opt.grid = cfg.grid;
  opt.regime_start = cfg.solver.r;
  const auto recs = find_resonances(cfg.potential, T.n_lo, T.n_hi, T.family, opt);
  AsymptoticConstants consts = AsymptoticConstants::from(cfg.potential);
  if (cfg.solver.r) consts.r = *cfg.solver.r;

  Csv csv({"n", "family", "re_lambda", "im_lambda", "residual", "multiplicity", "pred_re", "pred_im", "abs_err"});
  Csv rep({"n", "re_z", "im_z", "model_residual", "iterations", "converged", "warning"});
  std::vector<ResonanceRecord> in_regime;
  std::vector<double> pn, pe;
  int failed = 0;
  double max_res = 0.0;
  for (const auto& r : recs) {
    csv.row({std::to_string(r.n), family_name(r.family), num(r.lambda.real()), num(r.lambda.imag()), num(r.residual),
             std::to_string(r.multiplicity), num(r.prediction.real()), num(r.prediction.imag()), num(r.abs_error)});
    std::string warn = r.warning;
    std::replace(warn.begin(), warn.end(), ',', ';');
    rep.row({std::to_string(r.n), num(r.z.real()), num(r.z.imag()), num(r.model_residual), std::to_string(r.iterations),
             r.converged ? "1" : "0", warn});
    if (!r.converged) ++failed;
    max_res = std::max(max_res, r.residual);
    if (r.n >= consts.r) {
      in_regime.push_back(r);
      pn.push_back(r.n);
      pe.push_back(r.abs_error);
    }
  }
  w.write(".csv", csv.text());
  w.write(".report.csv", rep.text());
  w.write(".plotdata", plotdata("n", "abs_err", pn, pe));
  summary["records"] = recs.size();
  summary["non_converged"] = failed;
  summary["max_residual"] = max_res;
  summary["regime_start"] = consts.r;
  if (in_regime.size() >= 10) {
    const SequenceReport s = compare_sequences(in_regime, consts);
    summary["fitted_exponent"] = s.exponent;
    summary["fitted_constant"] = s.constant;
    summary["fit_rms"] = s.rms_residual;
    out << "fitted error exponent " << num(s.exponent) << " (constant " << num(s.constant) << ")\n";
  } else {
    out << "fewer than 10 records in the asymptotic regime; no rate fit\n";
  }
  out << recs.size() << " resonances, " << failed << " not converged, max residual " << num(max_res) << "\n";
  return failed ? exit_numerical : exit_ok;
}

// --- model-roots ------------------------------------------------------------

int cmd_model_roots(const RunConfig& cfg, Writer& w, json& summary, std::ostream& out) {
  const TaskConfig& T = cfg.task;
  ModelParams P{T.b, T.z_star, T.g};
  NewtonOptions no;
  no.tol = cfg.solver.tol;
  no.max_iter = std::max(cfg.solver.max_iter, 60);
  const auto roots = model_roots(P, T.n_lo, T.n_hi, T.family, no);

  std::vector<cplx> bf;
  bool bf_ok = true;
  if (T.brute_force) {
    const double sgn = family_sign(T.family);
    const double zs = P.z_star_for(T.family).real();
    const double xa = sgn * 2.0 * pi * T.n_lo + zs, xb = sgn * 2.0 * pi * T.n_hi + zs;
    double ylo = INFINITY, yhi = -INFINITY;
    for (const auto& r : roots) {
      ylo = std::min(ylo, r.z.imag());
      yhi = std::max(yhi, r.z.imag());
    }
    BruteForceOptions bo;
    bo.nx = T.n_hi - T.n_lo + 1;
    bo.ny = 1;
    const Rect region{std::min(xa, xb) - pi, std::max(xa, xb) + pi, ylo - 2.0, yhi + 2.0};
    auto fn = [&P](cplx z) {
      ScaledComplex v = f_model(z, P) - ScaledComplex{1.0};
      if (P.g) v = v - ScaledComplex{P.g->coef * branch_power(z, -P.g->beta)};
      return v;
    };
    const BruteForceResult res = brute_force_roots(ScaledFunction(fn), region, bo);
    for (const auto& f : res.roots) bf.push_back(f.z);
    summary["brute_force_count"] = res.roots.size();
    summary["brute_force_winding"] = res.total_winding;
    bf_ok = res.roots.size() == roots.size();
  }

  Csv csv({"n", "family", "re_z", "im_z", "residual", "pred_re", "pred_im", "abs_err", "scaled_err", "oracle_dist"});
  double kmax = 0.0, kmin = INFINITY, worst_match = 0.0;
  int failed = 0;
  std::vector<double> pn, pk;
  for (const auto& r : roots) {
    const cplx pred = P.g ? model_leading(P.b, r.n, r.family) + P.z_star_for(r.family)
                          : predicted_model_root(P, r.n, r.family);
    const double err = std::abs(r.z - pred);
    const double ln = std::log(double(r.n));
    const double scaled = P.g ? err * std::pow(double(r.n), P.g->beta) : err * r.n * r.n / (ln * ln);
    double dist = std::nan("");
    if (!bf.empty()) {
      dist = INFINITY;
      for (cplx z : bf) dist = std::min(dist, std::abs(z - r.z));
      worst_match = std::max(worst_match, dist);
    }
    if (!r.converged || r.basin_escape) ++failed;
    kmax = std::max(kmax, scaled);
    kmin = std::min(kmin, scaled);
    pn.push_back(r.n);
    pk.push_back(scaled);
    csv.row({std::to_string(r.n), family_name(r.family), num(r.z.real()), num(r.z.imag()), num(r.residual),
             num(pred.real()), num(pred.imag()), num(err), num(scaled), num(dist)});
  }
  if (!bf.empty() && worst_match > 1e-10) bf_ok = false;
  w.write(".csv", csv.text());
  w.write(".plotdata", plotdata("n", "scaled_err", pn, pk));
  summary["roots"] = roots.size();
  summary["non_converged"] = failed;
  summary["scaled_err_min"] = kmin;
  summary["scaled_err_max"] = kmax;
  if (T.brute_force) {
    summary["oracle_max_distance"] = worst_match;
    summary["oracle_agrees"] = bf_ok;
  }
  out << roots.size() << " model roots, " << failed << " flagged; scaled error in [" << num(kmin) << ", "
      << num(kmax) << "]\n";
  if (T.brute_force)
    out << "argument-principle oracle: " << (bf_ok ? "all roots re-found" : "MISMATCH") << ", max distance "
        << num(worst_match) << "\n";
  return (failed || !bf_ok) ? exit_numerical : exit_ok;
}

// --- scan-sector ------------------------------------------------------------

int cmd_scan(const RunConfig& cfg, Writer& w, json& summary, std::ostream& out) {
  const TaskConfig& T = cfg.task;
  ScanSpec s;
  s.phi_min = T.phi_lo;
  s.phi_max = T.phi_hi;
  s.r_min = T.r_lo;
  s.r_max = T.r_hi;
  s.n_phi = T.n_phi;
  s.n_r = T.n_r;
  const ScanReport rep = forbidden_domain_scan(cfg.potential, s);
  Csv csv({"r0", "r1", "phi0", "phi1", "re_center", "im_center", "log_abs_s", "log_bound_ratio", "winding"});
  std::vector<double> px, py;
  for (const auto& c : rep.cells) {
    csv.row({num(c.r0), num(c.r1), num(c.phi0), num(c.phi1), num(c.center.real()), num(c.center.imag()),
             num(c.log_abs_s), num(c.log_bound_ratio), std::to_string(c.winding)});
    px.push_back(std::abs(c.center));
    py.push_back(c.log_bound_ratio);
  }
  w.write(".csv", csv.text());
  w.write(".plotdata", plotdata("abs_lambda", "log_bound_ratio", px, py));
  summary["cells"] = rep.cells.size();
  summary["total_winding"] = rep.total_winding;
  summary["cells_with_winding"] = rep.cells_with_winding;
  summary["max_log_bound_ratio"] = rep.max_log_bound_ratio;
  summary["evaluations"] = rep.evaluations;
  out << rep.cells_with_winding << " winding cells (total winding " << rep.total_winding << ") over "
      << rep.cells.size() << " cells; max log(|S-1|/|xi|) = " << num(rep.max_log_bound_ratio) << "\n";
  return exit_ok;
}

// --- condition-c ------------------------------------------------------------

int cmd_condition_c(const RunConfig& cfg, Writer& w, json& summary, std::ostream& out) {
  const TaskConfig& T = cfg.task;
  const Potential& V = cfg.potential;
  Csv csv({"arg_k", "abs_k", "re_transform", "im_transform", "re_q", "im_q"});
  json fits = json::array();
  std::vector<double> px, py;
  bool all = true;
  for (double a : T.k_args) {
    std::vector<cplx> ks;
    for (int i = 0; i < T.k_count; ++i) {
      const double m = T.k_min * std::pow(T.k_max / T.k_min, double(i) / (T.k_count - 1));
      ks.push_back(std::polar(m, a));
    }
    for (cplx k : ks) {
      const cplx F = fourier_half(V, k);
      const cplx q = F * minus_ik_power(2.0 * k, V.p);
      csv.row({num(a), num(std::abs(k)), num(F.real()), num(F.imag()), num(q.real()), num(q.imag())});
      px.push_back(std::abs(k));
      py.push_back(std::abs(q));
    }
    const ConditionCFit f = condition_c_fit(V, ks);
    all = all && f.satisfied;
    fits.push_back({{"arg_k", a},
                    {"c_p_estimate", {f.c_p_estimate.real(), f.c_p_estimate.imag()}},
                    {"remainder_exponent", f.remainder_exponent},
                    {"effective_p", f.effective_p},
                    {"satisfied", f.satisfied}});
    out << "arg k = " << num(a) << ": C_p ~ " << num(f.c_p_estimate.real()) << (f.c_p_estimate.imag() < 0 ? "" : "+")
        << num(f.c_p_estimate.imag()) << "i, remainder exponent " << num(f.remainder_exponent) << ", effective p "
        << num(f.effective_p) << (f.satisfied ? "" : "  (Condition C not satisfied)") << "\n";
  }
  w.write(".csv", csv.text());
  w.write(".plotdata", plotdata("abs_k", "abs_q", px, py));
  summary["fits"] = fits;
  summary["satisfied"] = all;
  summary["c_p_formula"] = condition_c_constant(V);
  out << "c_star Gamma(p) = " << num(condition_c_constant(V)) << "\n";
  return exit_ok;
}

// --- count ------------------------------------------------------------------

int cmd_count(const RunConfig& cfg, Writer& w, json& summary, std::ostream& out) {
  const TaskConfig& T = cfg.task;
  const AsymptoticConstants consts = AsymptoticConstants::from(cfg.potential);
  const ModelParams P = consts.model();
  const double Z = 4.0 / 3.0 * std::pow(T.count_r_max, 1.5) + 10.0;
  BruteForceOptions bo;
  bo.nx = std::max(1, int(2.0 * Z / 3.1));
  bo.ny = 1;
  const Rect region{-Z, Z, 0.2, P.b * std::log(2.0 * Z) + std::abs(P.z_star.imag()) + 4.0};
  const BruteForceResult res = brute_force_roots(
      ScaledFunction([&P](cplx z) { return f_model(z, P) - ScaledComplex{1.0}; }), region, bo);
  std::vector<double> mods;
  for (const auto& r : res.roots) {
    const Family f = r.z.real() >= 0.0 ? Family::plus : Family::minus;
    for (int m = 0; m < std::max(1, r.multiplicity); ++m) mods.push_back(std::abs(map_z_lambda(r.z, f)));
  }
  Csv csv({"r", "count", "prediction", "ratio", "zworski"});
  std::vector<double> px, py;
  double worst = 0.0;
  for (double r = T.count_r_min; r <= T.count_r_max + 1e-9; r += T.count_r_step) {
    int N = 0;
    for (double m : mods) N += m <= r;
    const double pred = counting_prediction(r);
    worst = std::max(worst, std::abs(N / pred - 1.0));
    csv.row({num(r), std::to_string(N), num(pred), num(N / pred), num(zworski_count(r, cfg.potential.gamma))});
    px.push_back(r);
    py.push_back(N);
  }
  w.write(".csv", csv.text());
  w.write(".plotdata", plotdata("r", "count", px, py));
  summary["roots"] = res.roots.size();
  summary["max_relative_deviation"] = worst;
  out << res.roots.size() << " model roots in the census; max |N(r)/prediction - 1| = " << num(worst) << "\n";
  return exit_ok;
}

// --- selftest ---------------------------------------------------------------

int cmd_selftest(const RunConfig& cfg, Writer& w, json& summary, std::ostream& out) {
  struct Check {
    std::string name;
    double value, tol;
  };
  std::vector<Check> checks;
  {
    double worst = 0.0;
    for (cplx z : {cplx(0.3, 0.2), cplx(-2.0, 1.0), cplx(4.0, -3.0), cplx(-6.0, 0.5)}) {
      const AiryValue v = airy_eval(z);
      const cplx wr = v.scaled_wronskian() * std::exp(v.ai_exponent + v.bi_exponent);
      worst = std::max(worst, std::abs(wr - 1.0 / pi) * pi);
    }
    checks.push_back({"airy wronskian (moderate |z|)", worst, 1e-12});
  }
  {
    Potential zero;
    zero.smooth = SmoothPart::zero();
    zero.c_star = 0.0;
    const auto d = fredholm_det(zero, cplx(5.0, 1.0), GridSpec{});
    checks.push_back({"V = 0 gives D = 1", std::abs(d.det_value - 1.0), 0.0});
  }
  const Potential ref = Potential::reference_smooth();
  {
    const cplx lam(7.0, 2.0);
    const auto g = make_grid(ref, default_grid_spec(ref, lam));
    const cplx dp = fredholm_det(ref, lam, g, Branch::plus).det_value;
    const cplx dm = fredholm_det(ref, std::conj(lam), g, Branch::minus).det_value;
    checks.push_back({"conj D+(lambda) = D-(conj lambda)", std::abs(std::conj(dp) - dm) / std::abs(dp), 1e-10});
  }
  {
    const auto s = s_matrix(ref, cplx(10.0, 0.0));
    checks.push_back({"|S| = 1 on the real axis", std::abs(std::abs(s.s()) - 1.0), 1e-7});
    checks.push_back({"stationary S vs D-/D+", std::abs(s.s() - s.s_det_ratio.value()), 1e-6});
  }
  {
    ModelParams P{0.5, 0.0, std::nullopt};
    const auto nr = model_roots(P, 9, 18, Family::plus);
    const auto bf = brute_force_roots(ScaledFunction([&P](cplx z) { return f_model(z, P) - ScaledComplex{1.0}; }),
                                      Rect{2 * pi * 8.5, 2 * pi * 18.5, -1.0, 6.0}, BruteForceOptions{});
    double worst = bf.roots.size() == nr.size() ? 0.0 : INFINITY;
    for (const auto& r : nr) {
      double d = INFINITY;
      for (const auto& f : bf.roots) d = std::min(d, std::abs(f.z - r.z));
      worst = std::max(worst, d);
    }
    checks.push_back({"model roots re-found by the argument principle", worst, 1e-10});
  }
  Csv csv({"check", "value", "tolerance", "pass"});
  int failed = 0;
  for (const auto& c : checks) {
    const bool ok = c.value <= c.tol;
    failed += !ok;
    csv.row({c.name, num(c.value), num(c.tol), ok ? "1" : "0"});
    out << (ok ? "PASS " : "FAIL ") << c.name << ": " << num(c.value) << " (tol " << num(c.tol) << ")\n";
  }
  (void)cfg;
  w.write(".csv", csv.text());
  summary["checks"] = checks.size();
  summary["failed"] = failed;
  return failed ? exit_numerical : exit_ok;
}

std::string compiler_id() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

RunResult execute(const RunConfig& cfg, const std::vector<std::string>& argv, std::ostream& out) {
  cfg.validate();
  if (cfg.threads > 0 && !std::getenv("STARK_THREADS"))
    setenv("STARK_THREADS", std::to_string(cfg.threads).c_str(), 1);
  Writer w{cfg, {}};
  RunResult res;
  const auto t0 = std::chrono::steady_clock::now();
  const std::string& c = cfg.task.command;
  try {
    if (c == "resonances") res.status = cmd_resonances(cfg, w, res.summary, out);
    else if (c == "model-roots") res.status = cmd_model_roots(cfg, w, res.summary, out);
    else if (c == "scan-sector") res.status = cmd_scan(cfg, w, res.summary, out);
    else if (c == "condition-c") res.status = cmd_condition_c(cfg, w, res.summary, out);
    else if (c == "count") res.status = cmd_count(cfg, w, res.summary, out);
    else if (c == "selftest") res.status = cmd_selftest(cfg, w, res.summary, out);
  } catch (const AccuracyError& e) {
    res.status = exit_numerical;
    res.summary["error"] = e.what();
    out << "numerical failure: " << e.what() << " (achieved " << num(e.achieved) << ")\n";
  } catch (const SingularError& e) {
    res.status = exit_numerical;
    res.summary["error"] = e.what();
    out << "numerical failure: " << e.what() << "\n";
  } catch (const BoundaryZeroError& e) {
    res.status = exit_numerical;
    res.summary["error"] = e.what();
    out << "numerical failure: " << e.what() << " near " << num(e.where.real()) << "+" << num(e.where.imag()) << "i\n";
  } catch (const FitError& e) {
    res.status = exit_numerical;
    res.summary["error"] = e.what();
    out << "numerical failure: " << e.what() << "\n";
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json m;
  m["tool"] = "stark";
  m["version"] = STARK_VERSION;
  m["command"] = c;
  m["argv"] = argv;
  m["config"] = to_json(cfg);
  m["config_sha256"] = sha256_hex(m["config"].dump());
  m["versions"] = {{"stark", STARK_VERSION},
                   {"compiler", compiler_id()},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  m["threads"] = worker_count();
  m["wall_time_s"] = wall;
  m["exit_status"] = res.status;
  m["summary"] = res.summary;
  json outs = json::array();
  for (const auto& p : w.paths)
    outs.push_back({{"path", std::filesystem::path(p).filename().string()}, {"sha256", sha256_file(p)},
                    {"bytes", std::filesystem::file_size(p)}});
  m["outputs"] = outs;
  res.outputs = w.paths;
  w.paths.clear();
  std::filesystem::create_directories(cfg.output.dir);
  const std::string mp = w.path(".manifest.json");
  std::ofstream(mp) << m.dump(2) << "\n";
  res.outputs.push_back(mp);
  return res;
}

namespace {

int rerun(const std::string& manifest_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) {
    err << "rerun.manifest: cannot open " << manifest_path << "\n";
    return exit_config;
  }
  json m;
  try {
    in >> m;
  } catch (const json::parse_error& e) {
    err << "rerun.manifest: not valid JSON (" << e.what() << ")\n";
    return exit_config;
  }
  if (!m.contains("config") || !m.contains("outputs")) {
    err << "rerun.manifest: missing config or outputs\n";
    return exit_config;
  }
  RunConfig cfg;
  try {
    cfg = parse_config(m.at("config"));
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return exit_config;
  }
  if (!out_dir.empty()) cfg.output.dir = out_dir;
  std::vector<std::string> argv = m.value("argv", std::vector<std::string>{});
  RunResult r;
  try {
    r = execute(cfg, argv, out);
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return exit_config;
  }
  int mismatched = 0;
  for (const auto& o : m.at("outputs")) {
    const std::string name = o.at("path").get<std::string>();
    const std::string p = (std::filesystem::path(cfg.output.dir) / name).string();
    const bool same = std::filesystem::exists(p) && sha256_file(p) == o.at("sha256").get<std::string>();
    if (!same) {
      ++mismatched;
      out << "rerun: " << name << " differs from the recorded output\n";
    }
  }
  out << "rerun: " << (mismatched ? "outputs differ" : "outputs identical") << "\n";
  if (r.status != exit_ok) return r.status;
  return mismatched ? exit_numerical : exit_ok;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resonances of the Stark operator with a compactly supported potential", "stark"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  std::string config_path, out_dir, prefix;
  int threads = -1;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--prefix", prefix, "output file prefix (default: command name)");
  app.add_option("--threads", threads, "worker threads (STARK_THREADS takes precedence)");

  std::string family, n_range, mode, zstar, phi, r, mani;
  double b = -1, gcoef = NAN, gbeta = NAN, rmax = -1;
  bool no_bf = false, no_mult = false;

  auto* res = app.add_subcommand("resonances", "resonances of one family");
  res->add_option("--family", family, "plus or minus");
  res->add_option("--n", n_range, "index range lo..hi");
  res->add_option("--mode", mode, "born or full");
  res->add_flag("--no-multiplicity", no_mult, "skip the winding check around each root");

  auto* mr = app.add_subcommand("model-roots", "roots of e^{-i(z - z*)}/z^b = 1 + g(z)");
  mr->add_option("--b", b, "exponent b in (0, 1)");
  mr->add_option("--zstar", zstar, "z*, e.g. 1+1i");
  mr->add_option("--n", n_range, "index range lo..hi");
  mr->add_option("--family", family, "plus or minus");
  mr->add_option("--g-coef", gcoef, "perturbation coefficient c in g = c z^-beta");
  mr->add_option("--g-beta", gbeta, "perturbation decay exponent beta");
  mr->add_flag("--no-oracle", no_bf, "skip the argument-principle cross-check");

  auto* sc = app.add_subcommand("scan-sector", "argument-principle census of S over a polar sector");
  sc->add_option("--phi", phi, "arg lambda range lo..hi");
  sc->add_option("--r", r, "|lambda| range lo..hi");

  app.add_subcommand("condition-c", "fit of the potential transform against C_p / (-i2k)^p");
  auto* ct = app.add_subcommand("count", "resonance census against (4 / 3 pi) r^{3/2}");
  ct->add_option("--r-max", rmax, "largest radius");
  app.add_subcommand("selftest", "invariant checks");
  auto* rr = app.add_subcommand("rerun", "re-execute a run from its manifest");
  rr->add_option("--manifest", mani, "manifest file")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return exit_config;
  }
  const std::string cmd = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
  if (cmd == "rerun") return rerun(mani, out_dir, out, err);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!cmd.empty()) cfg.task.command = cmd;
    if (cfg.task.command.empty()) throw ConfigError("task.command: give a subcommand or set it in the config");
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    if (!prefix.empty()) cfg.output.prefix = prefix;
    if (threads >= 0) cfg.threads = unsigned(threads);
    if (!family.empty()) {
      try {
        cfg.task.family = parse_family(family);
      } catch (const std::invalid_argument&) {
        throw ConfigError("--family: expected plus or minus");
      }
    }
    if (!n_range.empty()) std::tie(cfg.task.n_lo, cfg.task.n_hi) = parse_int_range(n_range, "--n");
    if (!mode.empty()) {
      if (mode == "born") cfg.task.mode = ResonanceMode::born;
      else if (mode == "full") cfg.task.mode = ResonanceMode::full;
      else throw ConfigError("--mode: expected born or full");
    }
    if (no_mult) cfg.task.multiplicity = false;
    if (b != -1) cfg.task.b = b;
    if (!zstar.empty()) cfg.task.z_star = parse_complex(zstar, "--zstar");
    if (!std::isnan(gbeta) || !std::isnan(gcoef)) {
      Perturbation P = cfg.task.g.value_or(Perturbation{});
      if (!std::isnan(gcoef)) P.coef = gcoef;
      if (!std::isnan(gbeta)) P.beta = gbeta;
      cfg.task.g = P;
    }
    if (no_bf) cfg.task.brute_force = false;
    if (!phi.empty()) std::tie(cfg.task.phi_lo, cfg.task.phi_hi) = parse_real_range(phi, "--phi");
    if (!r.empty()) std::tie(cfg.task.r_lo, cfg.task.r_hi) = parse_real_range(r, "--r");
    if (rmax > 0) cfg.task.count_r_max = rmax;
    cfg.task.count_r_min = std::min(cfg.task.count_r_min, cfg.task.count_r_max);
    return execute(cfg, args, out).status;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  }
}

}  // namespace stark::cli
