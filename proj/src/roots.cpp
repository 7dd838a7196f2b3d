#include "stark/roots.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "stark/asympt.hpp"
#include "stark/parallel.hpp"
#include "stark/smatrix.hpp"

namespace stark {

const char* family_name(Family f) { return f == Family::plus ? "plus" : "minus"; }

Family parse_family(const std::string& s) {
  if (s == "plus" || s == "+") return Family::plus;
  if (s == "minus" || s == "-") return Family::minus;
  throw std::invalid_argument("family: expected plus or minus, got '" + s + "'");
}

cplx map_lambda_z(const SpectralPoint& lambda) {
  if (lambda.modulus() == 0.0) throw std::domain_error("map_lambda_z: lambda = 0");
  return lambda.z();
}

cplx map_z_lambda(cplx z, Family family) {
  if (z == cplx{}) throw std::domain_error("map_z_lambda: z = 0");
  double a = family == Family::plus ? continued_arg(z) : std::arg(z);
  if (family == Family::minus && a < 0.0) a += 2.0 * pi;
  return power_with_arg(0.75 * std::abs(z), a, 2.0 / 3.0);
}

void ModelParams::validate() const {
  if (!(b > 0.0 && b < 1.0)) throw std::invalid_argument("model.b: must lie in (0, 1)");
  if (!std::isfinite(z_star.real()) || !std::isfinite(z_star.imag()))
    throw std::invalid_argument("model.z_star: must be finite");
  if (g && !(g->beta > 0.0 && g->beta < 1.0)) throw std::invalid_argument("model.g.beta: must lie in (0, 1)");
}

namespace {

cplx log_z(cplx z) { return {std::log(std::abs(z)), continued_arg(z)}; }

// F - 1 - g and its derivative at z = shift + w, using e^{-i shift} = 1 for
// shift in 2 pi Z so the phase is computed from the small offset w.
struct ModelEval {
  cplx h, dh;
};

ModelEval model_eval(const ModelParams& P, double shift, cplx w) {
  const cplx z = shift + w;
  const cplx lz = log_z(z);
  const cplx F = std::exp(-I * (w - P.z_star) - P.b * lz);
  cplx h = F - 1.0, dh = F * (-I - P.b / z);
  if (P.g) {
    const cplx g = P.g->coef * std::exp(-P.g->beta * lz);
    h -= g;
    dh += P.g->beta * g / z;
  }
  return {h, dh};
}

}  // namespace

ScaledComplex f_model(cplx z, const ModelParams& params) {
  if (z == cplx{}) throw std::domain_error("f_model: z = 0");
  return ScaledComplex::from_log(-I * (z - params.z_star) - params.b * log_z(z));
}

cplx model_leading(double b, int n, Family family) {
  const double x = family_sign(family) * 2.0 * pi * n;
  return {x, b * std::log(2.0 * pi * std::abs(n))};
}

ModelRoot model_root(const ModelParams& P, int n, Family family, const NewtonOptions& opt, cplx seed_offset) {
  ModelRoot r;
  r.n = n;
  r.family = family;
  const cplx z0 = model_leading(P.b, n, family);
  const double shift = z0.real();
  r.seed = z0 + P.z_star_for(family) + seed_offset;
  cplx w = r.seed - shift;
  ModelEval e = model_eval(P, shift, w);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const cplx dw = -e.h / e.dh;
    w += dw;
    e = model_eval(P, shift, w);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
    if (std::abs(dw) <= 1e-15 * std::max(1.0, std::abs(w))) break;
  }
  r.iterations = it;
  r.z = shift + w;
  r.residual = std::abs(e.h);
  r.derivative = std::abs(e.dh);
  r.converged = std::isfinite(r.residual) && r.residual <= opt.tol && r.derivative > 1e-8;
  r.basin_escape = std::abs(r.z - r.seed) > pi;
  return r;
}

std::vector<ModelRoot> model_roots(const ModelParams& params, int n_lo, int n_hi, Family family,
                                   const NewtonOptions& opt) {
  params.validate();
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("model_roots: need 1 <= n_lo <= n_hi");
  std::vector<ModelRoot> out(n_hi - n_lo + 1);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = model_root(params, n_lo + int(i), family, opt); });
  return out;
}

// ---------------------------------------------------------------------------
// argument principle

namespace {

struct EdgeZero {
  cplx where;
};

double wrap(double d) {
  d = std::remainder(d, 2.0 * pi);
  return d == -pi ? pi : d;
}

struct PointKey {
  double x, y;
  bool operator<(const PointKey& o) const { return x < o.x || (x == o.x && y < o.y); }
};

class Census {
 public:
  Census(const ScaledFunction& f, const BruteForceOptions& opt) : f_(f), opt_(opt) {}

  ScaledComplex at(cplx z) {
    auto it = cache_.find({z.real(), z.imag()});
    if (it != cache_.end()) return it->second;
    ScaledComplex v = f_(z);
    cache_.emplace(PointKey{z.real(), z.imag()}, v);
    return v;
  }

  // Phase change of f from a to b. Sampling always runs from the
  // lexicographically smaller endpoint, so a shared edge gives the same
  // answer (negated) to both neighbouring cells.
  double edge(cplx a, cplx b, int samples) {
    const bool flip = PointKey{b.real(), b.imag()} < PointKey{a.real(), a.imag()};
    if (flip) std::swap(a, b);
    auto point = [&](double t) { return t == 1.0 ? b : a + (b - a) * t; };
    struct Seg { double t0, t1; double a0, a1; int depth; };
    auto phase = [&](double t) {
      const cplx z = point(t);
      const ScaledComplex v = at(z);
      if (v.is_zero() || !std::isfinite(v.exponent) || !std::isfinite(v.mantissa.real()))
        throw EdgeZero{z};
      return std::arg(v.mantissa);
    };
    std::vector<Seg> work;
    double prev = phase(0.0);
    std::vector<Seg> first;
    for (int q = 1; q <= samples; ++q) {
      const double t0 = double(q - 1) / samples, t1 = double(q) / samples;
      const double ph = phase(t1);
      first.push_back({t0, t1, prev, ph, 0});
      prev = ph;
    }
    work.assign(first.rbegin(), first.rend());
    double total = 0.0;
    while (!work.empty()) {
      Seg s = work.back();
      work.pop_back();
      const double d = wrap(s.a1 - s.a0);
      if (std::abs(d) > pi / 3) {
        if (s.depth >= opt_.max_edge_depth) throw EdgeZero{point(0.5 * (s.t0 + s.t1))};
        const double tm = 0.5 * (s.t0 + s.t1);
        const double am = phase(tm);
        work.push_back({tm, s.t1, am, s.a1, s.depth + 1});
        work.push_back({s.t0, tm, s.a0, am, s.depth + 1});
        continue;
      }
      total += d;
    }
    return flip ? -total : total;
  }

  int winding(const Rect& c, int samples) {
    const cplx p00{c.x0, c.y0}, p10{c.x1, c.y0}, p11{c.x1, c.y1}, p01{c.x0, c.y1};
    const double w = edge(p00, p10, samples) + edge(p10, p11, samples) + edge(p11, p01, samples) +
                     edge(p01, p00, samples);
    return static_cast<int>(std::lround(w / (2.0 * pi)));
  }

  // secant iteration from the cell center
  std::optional<FoundRoot> polish(const Rect& c) {
    const cplx center{0.5 * (c.x0 + c.x1), 0.5 * (c.y0 + c.y1)};
    const double diam = std::hypot(c.x1 - c.x0, c.y1 - c.y0);
    cplx z0 = center, z1 = center + 0.25 * diam;
    ScaledComplex f0 = f_(z0), f1 = f_(z1);
    for (int it = 0; it < 60; ++it) {
      const ScaledComplex den = f1 - f0;
      if (den.is_zero() || f1.is_zero()) break;
      const cplx step = (f1 / den).value() * (z1 - z0);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
      z0 = z1;
      f0 = f1;
      z1 -= step;
      f1 = f_(z1);
      if (std::abs(step) <= opt_.polish_tol * std::max(1.0, std::abs(z1))) break;
    }
    if (std::abs(z1 - center) > diam) return std::nullopt;
    FoundRoot r;
    r.z = z1;
    r.residual = f1.is_zero() ? 0.0 : std::exp(f1.log_abs());
    r.polished = true;
    return r;
  }

  void process(const Rect& top, int top_winding, std::vector<FoundRoot>& out) {
    struct Cell { Rect r; int w; int depth; };
    std::vector<Cell> stack{{top, top_winding, 0}};
    static constexpr double fractions[] = {0.5, 0.5137, 0.4871, 0.5293, 0.4711};
    while (!stack.empty()) {
      Cell c = stack.back();
      stack.pop_back();
      if (c.w == 0) continue;
      const double diam = std::hypot(c.r.x1 - c.r.x0, c.r.y1 - c.r.y0);
      if (diam <= opt_.tol || c.depth >= opt_.max_cell_depth) {
        FoundRoot fr;
        fr.z = {0.5 * (c.r.x0 + c.r.x1), 0.5 * (c.r.y0 + c.r.y1)};
        fr.multiplicity = c.w;
        if (c.w == 1) {
          if (auto p = polish(c.r)) fr = *p;
        }
        const ScaledComplex v = at(fr.z);
        if (!fr.polished) fr.residual = v.is_zero() ? 0.0 : std::exp(v.log_abs());
        out.push_back(fr);
        continue;
      }
      bool done = false;
      for (double fx : fractions) {
        const double xm = c.r.x0 + fx * (c.r.x1 - c.r.x0), ym = c.r.y0 + fx * (c.r.y1 - c.r.y0);
        const Rect kids[4] = {{c.r.x0, xm, c.r.y0, ym}, {xm, c.r.x1, c.r.y0, ym},
                              {xm, c.r.x1, ym, c.r.y1}, {c.r.x0, xm, ym, c.r.y1}};
        try {
          int w[4], sum = 0;
          int samples = opt_.edge_samples;
          for (int attempt = 0; attempt < 2; ++attempt) {
            sum = 0;
            for (int q = 0; q < 4; ++q) sum += (w[q] = winding(kids[q], samples));
            if (sum == c.w) break;
            samples *= 2;
          }
          for (int q = 0; q < 4; ++q) stack.push_back({kids[q], w[q], c.depth + 1});
          done = true;
          break;
        } catch (const EdgeZero&) {
          // a zero sits on an inner edge; move the split
        }
      }
      if (!done) {
        FoundRoot fr;
        fr.z = {0.5 * (c.r.x0 + c.r.x1), 0.5 * (c.r.y0 + c.r.y1)};
        fr.multiplicity = c.w;
        out.push_back(fr);
      }
    }
  }

  std::size_t evaluations() const { return cache_.size(); }

 private:
  const ScaledFunction& f_;
  const BruteForceOptions& opt_;
  std::map<PointKey, ScaledComplex> cache_;
};

}  // namespace

int winding_number(const ScaledFunction& f, const Rect& cell, int edge_samples, int max_depth) {
  BruteForceOptions opt;
  opt.edge_samples = edge_samples;
  opt.max_edge_depth = max_depth;
  Census c(f, opt);
  try {
    return c.winding(cell, edge_samples);
  } catch (const EdgeZero& e) {
    throw BoundaryZeroError("winding_number: f vanishes on the cell boundary; shift the cell", e.where);
  }
}

BruteForceResult brute_force_roots(const ScaledFunction& f, const Rect& region, const BruteForceOptions& opt) {
  if (!(region.x1 > region.x0 && region.y1 > region.y0))
    throw std::invalid_argument("brute_force_roots: empty region");
  if (opt.nx < 1 || opt.ny < 1 || opt.edge_samples < 1) throw std::invalid_argument("brute_force_roots: bad resolution");
  const double dx = (region.x1 - region.x0) / opt.nx, dy = (region.y1 - region.y0) / opt.ny;
  const std::size_t nc = std::size_t(opt.nx) * opt.ny;
  std::vector<std::vector<FoundRoot>> found(nc);
  std::vector<int> wind(nc, 0);
  std::vector<std::size_t> evals(nc, 0);
  std::mutex err_mu;
  std::optional<BoundaryZeroError> err;
  parallel_for(nc, [&](std::size_t idx) {
    const int ix = int(idx % opt.nx), iy = int(idx / opt.nx);
    const Rect cell{region.x0 + ix * dx, ix + 1 == opt.nx ? region.x1 : region.x0 + (ix + 1) * dx,
                    region.y0 + iy * dy, iy + 1 == opt.ny ? region.y1 : region.y0 + (iy + 1) * dy};
    Census c(f, opt);
    try {
      wind[idx] = c.winding(cell, opt.edge_samples);
    } catch (const EdgeZero& e) {
      std::lock_guard<std::mutex> lk(err_mu);
      if (!err)
        err.emplace("brute_force_roots: f vanishes on a cell boundary; perturb the region or change nx/ny",
                    e.where);
      return;
    }
    c.process(cell, wind[idx], found[idx]);
    evals[idx] = c.evaluations();
  });
  if (err) throw *err;
  BruteForceResult res;
  for (std::size_t i = 0; i < nc; ++i) {
    res.total_winding += wind[i];
    res.evaluations += evals[i];
    for (auto& r : found[i]) res.roots.push_back(r);
  }
  std::sort(res.roots.begin(), res.roots.end(), [](const FoundRoot& a, const FoundRoot& b) {
    return a.z.real() < b.z.real() || (a.z.real() == b.z.real() && a.z.imag() < b.z.imag());
  });
  return res;
}

BruteForceResult brute_force_roots_plain(const std::function<cplx(cplx)>& f, const Rect& region,
                                         const BruteForceOptions& opt) {
  return brute_force_roots(ScaledFunction([&f](cplx z) { return ScaledComplex{f(z)}.normalized(); }), region,
                           opt);
}

// ---------------------------------------------------------------------------
// resonances

double model_residual(const Potential& V, cplx lambda) {
  const SpectralPoint sp(lambda);
  const cplx k = sp.k();
  const double cp = condition_c_constant(V);
  const cplx lg = std::log(cp) - I * sp.z() - (V.p + 1.0) * log_minus_ik(2.0 * k);
  return std::abs(1.0 - I * ScaledComplex::from_log(lg).value());
}

namespace {

struct Equation {
  ScaledComplex h, dh;  // dh is the z-derivative (born mode only)
};

Equation born_equation(const Potential& V, cplx z, Family fam) {
  const cplx lam = map_z_lambda(z, fam);
  const SpectralPoint sp(lam);
  const ScaledComplex a0v = a0_scaled(V, sp);
  const ScaledComplex da0 = a0_derivative_scaled(V, sp);
  return {ScaledComplex{1.0} + a0v, da0 * ScaledComplex{2.0 / 3.0 * lam / z}};
}

ScaledComplex full_equation(const Potential& V, cplx z, Family fam, const NystromGrid& grid) {
  const cplx lam = map_z_lambda(z, fam);
  return NystromSystem(V, lam, grid, Branch::minus).determinant().det;
}

}  // namespace

std::vector<ResonanceRecord> find_resonances(const Potential& V, int n_lo, int n_hi, Family family,
                                             const ResonanceOptions& opt) {
  V.validate(true);
  if (!V.singular()) throw std::invalid_argument("find_resonances: Condition C needs c_star != 0");
  AsymptoticConstants consts = AsymptoticConstants::from(V);
  if (opt.regime_start) consts.r = *opt.regime_start;
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("find_resonances: need 1 <= n_lo <= n_hi");
  std::vector<ResonanceRecord> out(n_hi - n_lo + 1);

  parallel_for(out.size(), [&](std::size_t idx) {
    ResonanceRecord rec;
    rec.n = n_lo + int(idx);
    rec.family = family;
    const ModelParams mp = consts.model();
    cplx z = predicted_model_root(mp, rec.n, family);
    const cplx seed = z;
    double last_step = INFINITY;
    int it = 0;
    // born root first; it seeds the full mode
    for (; it < opt.max_iter; ++it) {
      const Equation e = born_equation(V, z, family);
      const cplx step = (e.h / e.dh).value();
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
      last_step = std::abs(step);
      if (last_step <= opt.tol) break;
    }
    rec.iterations = it + 1;
    rec.converged = last_step <= opt.tol;
    if (!rec.converged && last_step <= 1e-9) {
      rec.converged = true;
      rec.warning = "born: step settled at " + std::to_string(last_step);
    }
    ScaledFunction fn;
    std::optional<NystromGrid> grid;
    if (opt.mode == ResonanceMode::born) {
      rec.residual = std::exp(born_equation(V, z, family).h.log_abs());
      fn = [&V, family](cplx zz) { return born_equation(V, zz, family).h; };
    } else {
      const cplx lam0 = map_z_lambda(z, family);
      grid = make_grid(V, opt.grid ? *opt.grid : default_grid_spec(V, lam0));
      const NystromGrid& g = *grid;
      fn = [&V, family, &g](cplx zz) { return full_equation(V, zz, family, g); };
      cplx z0 = z, z1 = z + 1e-3;
      ScaledComplex f0 = fn(z0), f1 = fn(z1);
      double step_abs = INFINITY;
      int fit = 0;
      for (; fit < opt.max_iter; ++fit) {
        const ScaledComplex den = f1 - f0;
        if (den.is_zero() || f1.is_zero()) {
          step_abs = 0.0;
          break;
        }
        const cplx step = (f1 / den).value() * (z1 - z0);
        z0 = z1;
        f0 = f1;
        z1 -= step;
        f1 = fn(z1);
        step_abs = std::abs(step);
        if (step_abs <= opt.tol) break;
      }
      const bool ok = step_abs <= std::max(opt.tol, 1e-9);
      if (std::abs(z1 - z) > 1.0) rec.warning += (rec.warning.empty() ? "" : "; ") + std::string("full and born roots differ by more than 1 in z");
      z = z1;
      rec.iterations += fit + 1;
      rec.converged = rec.converged && ok;
      // |D-| relative to its size a unit away in z
      const double ref = std::exp(fn(z + 0.5).log_abs());
      rec.residual = f1.is_zero() ? 0.0 : std::exp(f1.log_abs()) / ref;
    }
    if (std::abs(z - seed) > pi)
      rec.warning += (rec.warning.empty() ? "" : "; ") + std::string("root farther than pi from its seed");
    rec.z = z;
    rec.lambda = map_z_lambda(z, family);
    rec.model_residual = model_residual(V, rec.lambda);
    if (opt.multiplicity) {
      try {
        rec.multiplicity = winding_number(fn, Rect{z.real() - 0.5, z.real() + 0.5, z.imag() - 0.5, z.imag() + 0.5});
      } catch (const BoundaryZeroError&) {
        rec.multiplicity = -1;
        rec.warning += (rec.warning.empty() ? "" : "; ") + std::string("winding box touches a zero");
      }
    }
    if (rec.n >= consts.r) {
      rec.prediction = predicted_resonance(consts, rec.n, family);
      rec.abs_error = std::abs(rec.lambda - rec.prediction);
    } else {
      rec.prediction = std::nan("");
      rec.abs_error = std::nan("");
    }
    out[idx] = rec;
  });
  return out;
}

}  // namespace stark
