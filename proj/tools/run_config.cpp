#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>

namespace stark::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError((path.empty() ? "" : path + ".") + it.key() + ": unknown field");
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double get_real(const json& j, const std::string& path, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key) + ": must be finite");
  return x;
}

int get_int(const json& j, const std::string& path, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const std::string& path, const char* key, bool dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_boolean()) throw ConfigError(join(path, key) + ": expected true or false");
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string()) throw ConfigError(join(path, key) + ": expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> get_reals(const json& j, const std::string& path, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(join(path, key) + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(join(path, key) + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

cplx get_complex(const json& j, const std::string& path, const char* key, cplx dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (v.is_string()) return parse_complex(v.get<std::string>(), join(path, key));
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(join(path, key) + ": expected [re, im], a number or a string like 1+2i");
}

std::pair<double, double> get_real_pair(const json& j, const std::string& path, const char* key,
                                        std::pair<double, double> dflt) {
  if (!j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (v.is_string()) return parse_real_range(v.get<std::string>(), join(path, key));
  const auto xs = get_reals(j, path, key);
  if (xs.size() != 2) throw ConfigError(join(path, key) + ": expected [lo, hi]");
  return {xs[0], xs[1]};
}

SmoothPart parse_smooth(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "coeffs", "breaks", "pieces", "x", "y", "order"});
  const std::string kind = get_string(j, path, "kind", "zero");
  if (kind == "zero") return SmoothPart::zero();
  if (kind == "polynomial") {
    if (!j.contains("coeffs")) throw ConfigError(path + ".coeffs: required for a polynomial");
    return SmoothPart::polynomial(get_reals(j, path, "coeffs"));
  }
  if (kind == "piecewise") {
    if (!j.contains("breaks") || !j.contains("pieces"))
      throw ConfigError(path + ": piecewise needs breaks and pieces");
    auto br = get_reals(j, path, "breaks");
    std::vector<std::vector<double>> pcs;
    if (!j.at("pieces").is_array()) throw ConfigError(path + ".pieces: expected an array of arrays");
    for (const auto& p : j.at("pieces")) {
      if (!p.is_array()) throw ConfigError(path + ".pieces: expected an array of arrays");
      std::vector<double> c;
      for (const auto& e : p) {
        if (!e.is_number()) throw ConfigError(path + ".pieces: coefficients must be numbers");
        c.push_back(e.get<double>());
      }
      pcs.push_back(c);
    }
    if (br.size() < 2 || pcs.size() + 1 != br.size())
      throw ConfigError(path + ".pieces: need one coefficient list per interval between breaks");
    for (std::size_t i = 1; i < br.size(); ++i)
      if (!(br[i] > br[i - 1])) throw ConfigError(path + ".breaks: must be strictly increasing");
    return SmoothPart::piecewise(br, pcs);
  }
  if (kind == "table") {
    if (!j.contains("x") || !j.contains("y")) throw ConfigError(path + ": table needs x and y");
    auto xs = get_reals(j, path, "x"), ys = get_reals(j, path, "y");
    const int order = get_int(j, path, "order", 3);
    if (xs.size() != ys.size() || xs.size() < 2) throw ConfigError(path + ".y: must match x in length (>= 2)");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) throw ConfigError(path + ".x: must be strictly increasing");
    if (order < 1 || order >= int(xs.size())) throw ConfigError(path + ".order: must lie in [1, len(x) - 1]");
    return SmoothPart::table(xs, ys, order);
  }
  throw ConfigError(path + ".kind: expected zero, polynomial, piecewise or table");
}

json smooth_json(const SmoothPart& s) {
  switch (s.kind) {
    case SmoothPart::Kind::zero: return {{"kind", "zero"}};
    case SmoothPart::Kind::polynomial: return {{"kind", "polynomial"}, {"coeffs", s.coeffs}};
    case SmoothPart::Kind::piecewise: return {{"kind", "piecewise"}, {"breaks", s.breaks}, {"pieces", s.piece_coeffs}};
    case SmoothPart::Kind::table: return {{"kind", "table"}, {"x", s.xs}, {"y", s.ys}, {"order", s.order}};
  }
  return {};
}

Grading parse_grading(const std::string& s, const std::string& field) {
  if (s == "automatic") return Grading::automatic;
  if (s == "uniform") return Grading::uniform;
  if (s == "geometric") return Grading::geometric;
  if (s == "algebraic") return Grading::algebraic;
  throw ConfigError(field + ": expected automatic, uniform, geometric or algebraic");
}

const char* grading_name(Grading g) {
  switch (g) {
    case Grading::automatic: return "automatic";
    case Grading::uniform: return "uniform";
    case Grading::geometric: return "geometric";
    case Grading::algebraic: return "algebraic";
  }
  return "automatic";
}

const std::set<std::string> commands{"resonances", "model-roots", "scan-sector", "condition-c", "count", "selftest"};

}  // namespace

std::pair<int, int> parse_int_range(const std::string& s, const std::string& field) {
  static const std::regex re(R"(^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ConfigError(field + ": expected a range like 10..60");
  return {std::stoi(m[1]), std::stoi(m[2])};
}

std::pair<double, double> parse_real_range(const std::string& s, const std::string& field) {
  const auto pos = s.find("..");
  if (pos == std::string::npos) throw ConfigError(field + ": expected a range like 30..120");
  try {
    std::size_t used = 0;
    const std::string a = s.substr(0, pos), b = s.substr(pos + 2);
    const double lo = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument("trailing");
    const double hi = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument("trailing");
    return {lo, hi};
  } catch (const std::exception&) {
    throw ConfigError(field + ": expected a range like 30..120");
  }
}

cplx parse_complex(const std::string& s, const std::string& field) {
  static const std::regex full(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([+-]\s*(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij]\s*$)");
  static const std::regex imag(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij]\s*$)");
  static const std::regex real(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*$)");
  std::smatch m;
  auto num = [](std::string t) {
    t.erase(std::remove(t.begin(), t.end(), ' '), t.end());
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return std::stod(t);
  };
  if (std::regex_match(s, m, full)) return {num(m[1]), num(m[2])};
  if (std::regex_match(s, m, imag)) return {0.0, num(m[1])};
  if (std::regex_match(s, m, real)) return {num(m[1]), 0.0};
  throw ConfigError(field + ": expected a complex number like 1+2i");
}

RunConfig parse_config(const json& j, RunConfig c) {
  check_keys(j, "", {"potential", "grid", "solver", "task", "output", "threads", "seed"});
  if (j.contains("potential")) {
    const json& p = j.at("potential");
    check_keys(p, "potential", {"gamma", "c_star", "p", "nu", "smooth_part"});
    Potential V = c.potential;
    V.gamma = get_real(p, "potential", "gamma", V.gamma);
    V.c_star = get_real(p, "potential", "c_star", V.c_star);
    V.p = get_real(p, "potential", "p", V.p);
    V.nu = get_real(p, "potential", "nu", V.nu);
    if (p.contains("smooth_part")) V.smooth = parse_smooth(p.at("smooth_part"), "potential.smooth_part");
    c.potential = V;
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, "grid", {"panels", "order", "grading", "sigma", "levels", "exponent", "auto_refine",
                           "refine_tol", "max_doublings"});
    GridSpec s = c.grid.value_or(GridSpec{});
    s.panels = get_int(g, "grid", "panels", s.panels);
    s.order = get_int(g, "grid", "order", s.order);
    if (g.contains("grading")) s.grading = parse_grading(get_string(g, "grid", "grading", ""), "grid.grading");
    s.sigma = get_real(g, "grid", "sigma", s.sigma);
    s.levels = get_int(g, "grid", "levels", s.levels);
    s.exponent = get_real(g, "grid", "exponent", s.exponent);
    s.auto_refine = get_bool(g, "grid", "auto_refine", s.auto_refine);
    s.refine_tol = get_real(g, "grid", "refine_tol", s.refine_tol);
    s.max_doublings = get_int(g, "grid", "max_doublings", s.max_doublings);
    c.grid = s;
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, "solver", {"tol", "max_iter", "r"});
    c.solver.tol = get_real(s, "solver", "tol", c.solver.tol);
    c.solver.max_iter = get_int(s, "solver", "max_iter", c.solver.max_iter);
    if (s.contains("r")) {
      if (s.at("r").is_null()) c.solver.r.reset();
      else c.solver.r = get_int(s, "solver", "r", 1);
    }
  }
  if (j.contains("task")) {
    const json& t = j.at("task");
    check_keys(t, "task", {"command", "family", "n", "mode", "multiplicity", "b", "z_star", "g", "brute_force",
                           "phi", "r", "n_phi", "n_r", "k_min", "k_max", "k_count", "k_args", "count_r"});
    TaskConfig& T = c.task;
    T.command = get_string(t, "task", "command", T.command);
    if (t.contains("family")) {
      try {
        T.family = parse_family(get_string(t, "task", "family", "plus"));
      } catch (const std::invalid_argument&) {
        throw ConfigError("task.family: expected plus or minus");
      }
    }
    if (t.contains("n")) {
      const json& n = t.at("n");
      if (n.is_string()) std::tie(T.n_lo, T.n_hi) = parse_int_range(n.get<std::string>(), "task.n");
      else if (n.is_array() && n.size() == 2 && n[0].is_number_integer() && n[1].is_number_integer())
        T.n_lo = n[0].get<int>(), T.n_hi = n[1].get<int>();
      else throw ConfigError("task.n: expected [lo, hi] or \"lo..hi\"");
    }
    if (t.contains("mode")) {
      const std::string m = get_string(t, "task", "mode", "born");
      if (m == "born") T.mode = ResonanceMode::born;
      else if (m == "full") T.mode = ResonanceMode::full;
      else throw ConfigError("task.mode: expected born or full");
    }
    T.multiplicity = get_bool(t, "task", "multiplicity", T.multiplicity);
    T.b = get_real(t, "task", "b", T.b);
    T.z_star = get_complex(t, "task", "z_star", T.z_star);
    if (t.contains("g")) {
      if (t.at("g").is_null()) {
        T.g.reset();
      } else {
        const json& g = t.at("g");
        check_keys(g, "task.g", {"coef", "beta"});
        Perturbation P;
        P.coef = get_complex(g, "task.g", "coef", P.coef);
        P.beta = get_real(g, "task.g", "beta", P.beta);
        T.g = P;
      }
    }
    T.brute_force = get_bool(t, "task", "brute_force", T.brute_force);
    std::tie(T.phi_lo, T.phi_hi) = get_real_pair(t, "task", "phi", {T.phi_lo, T.phi_hi});
    std::tie(T.r_lo, T.r_hi) = get_real_pair(t, "task", "r", {T.r_lo, T.r_hi});
    T.n_phi = get_int(t, "task", "n_phi", T.n_phi);
    T.n_r = get_int(t, "task", "n_r", T.n_r);
    T.k_min = get_real(t, "task", "k_min", T.k_min);
    T.k_max = get_real(t, "task", "k_max", T.k_max);
    T.k_count = get_int(t, "task", "k_count", T.k_count);
    if (t.contains("k_args")) T.k_args = get_reals(t, "task", "k_args");
    if (t.contains("count_r")) {
      const auto v = get_reals(t, "task", "count_r");
      if (v.size() != 3) throw ConfigError("task.count_r: expected [r_min, r_max, step]");
      T.count_r_min = v[0], T.count_r_max = v[1], T.count_r_step = v[2];
    }
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"dir", "prefix"});
    c.output.dir = get_string(o, "output", "dir", c.output.dir);
    c.output.prefix = get_string(o, "output", "prefix", c.output.prefix);
  }
  if (j.contains("threads")) {
    const int t = get_int(j, "", "threads", 0);
    if (t < 0) throw ConfigError("threads: must be >= 0");
    c.threads = unsigned(t);
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      throw ConfigError("seed: expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + " is not valid JSON (" + e.what() + ")");
  }
  return parse_config(j, std::move(base));
}

void RunConfig::validate() const {
  try {
    potential.validate(false);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (grid) {
    if (grid->panels < 1) throw ConfigError("grid.panels: must be >= 1");
    if (grid->order < 2 || grid->order > 64) throw ConfigError("grid.order: must lie in [2, 64]");
    if (!(grid->sigma > 0.0 && grid->sigma < 1.0)) throw ConfigError("grid.sigma: must lie in (0, 1)");
    if (grid->levels < 0 || grid->levels > 60) throw ConfigError("grid.levels: must lie in [0, 60]");
    if (grid->exponent < 0.0) throw ConfigError("grid.exponent: must be >= 0");
    if (!(grid->refine_tol > 0.0)) throw ConfigError("grid.refine_tol: must be positive");
    if (grid->max_doublings < 0 || grid->max_doublings > 6) throw ConfigError("grid.max_doublings: must lie in [0, 6]");
  }
  if (!(solver.tol > 0.0 && solver.tol < 1e-2)) throw ConfigError("solver.tol: must lie in (0, 1e-2)");
  if (solver.max_iter < 1) throw ConfigError("solver.max_iter: must be >= 1");
  if (solver.r && *solver.r < 1) throw ConfigError("solver.r: must be >= 1");
  const TaskConfig& T = task;
  if (!commands.count(T.command)) throw ConfigError("task.command: unknown command '" + T.command + "'");
  if (T.n_lo < 1 || T.n_hi < T.n_lo) throw ConfigError("task.n: need 1 <= lo <= hi");
  if (!(T.b > 0.0 && T.b < 1.0)) throw ConfigError("task.b: must lie in (0, 1)");
  if (T.g && !(T.g->beta > 0.0 && T.g->beta < 1.0)) throw ConfigError("task.g.beta: must lie in (0, 1)");
  if (!(T.phi_lo >= 0.0 && T.phi_hi <= pi + 1e-12 && T.phi_lo < T.phi_hi))
    throw ConfigError("task.phi: need 0 <= lo < hi <= pi");
  if (!(T.r_lo > 0.0 && T.r_hi > T.r_lo)) throw ConfigError("task.r: need 0 < lo < hi");
  if (T.n_phi < 1 || T.n_r < 1) throw ConfigError("task.n_phi: cell counts must be >= 1");
  if (!(T.k_min > 0.0 && T.k_max > T.k_min)) throw ConfigError("task.k_min: need 0 < k_min < k_max");
  if (T.k_count < 4) throw ConfigError("task.k_count: must be >= 4");
  if (T.k_args.empty()) throw ConfigError("task.k_args: must not be empty");
  for (double a : T.k_args)
    if (!(a >= 0.0 && a <= pi)) throw ConfigError("task.k_args: each arg must lie in [0, pi]");
  if (!(T.count_r_min > 0.0 && T.count_r_max >= T.count_r_min && T.count_r_step > 0.0))
    throw ConfigError("task.count_r: need 0 < r_min <= r_max and step > 0");
  if (output.dir.empty()) throw ConfigError("output.dir: must not be empty");
  if ((T.command == "resonances") && !potential.singular())
    throw ConfigError("potential.c_star: resonances needs c_star != 0 (Condition C)");
}

json to_json(const RunConfig& c) {
  json j;
  const Potential& V = c.potential;
  j["potential"] = {{"gamma", V.gamma}, {"c_star", V.c_star}, {"p", V.p}, {"nu", V.nu}, {"smooth_part", smooth_json(V.smooth)}};
  if (c.grid) {
    const GridSpec& s = *c.grid;
    j["grid"] = {{"panels", s.panels}, {"order", s.order}, {"grading", grading_name(s.grading)},
                 {"sigma", s.sigma}, {"levels", s.levels}, {"exponent", s.exponent},
                 {"auto_refine", s.auto_refine}, {"refine_tol", s.refine_tol}, {"max_doublings", s.max_doublings}};
  }
  j["solver"] = {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}};
  j["solver"]["r"] = c.solver.r ? json(*c.solver.r) : json(nullptr);
  const TaskConfig& T = c.task;
  j["task"] = {{"command", T.command},
               {"family", family_name(T.family)},
               {"n", {T.n_lo, T.n_hi}},
               {"mode", T.mode == ResonanceMode::born ? "born" : "full"},
               {"multiplicity", T.multiplicity},
               {"b", T.b},
               {"z_star", {T.z_star.real(), T.z_star.imag()}},
               {"brute_force", T.brute_force},
               {"phi", {T.phi_lo, T.phi_hi}},
               {"r", {T.r_lo, T.r_hi}},
               {"n_phi", T.n_phi},
               {"n_r", T.n_r},
               {"k_min", T.k_min},
               {"k_max", T.k_max},
               {"k_count", T.k_count},
               {"k_args", T.k_args},
               {"count_r", {T.count_r_min, T.count_r_max, T.count_r_step}}};
  j["task"]["g"] = T.g ? json{{"coef", {T.g->coef.real(), T.g->coef.imag()}}, {"beta", T.g->beta}} : json(nullptr);
  j["output"] = {{"dir", c.output.dir}, {"prefix", c.output.prefix}};
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  return j;
}

}  // namespace stark::cli
