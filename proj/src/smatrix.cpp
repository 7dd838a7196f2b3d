#include "stark/smatrix.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <stdexcept>

#include "stark/airy.hpp"
#include "stark/parallel.hpp"

namespace stark {

namespace {

struct ScaledSum {
  std::vector<cplx> m;
  std::vector<double> e;
  void add(cplx mantissa, double exponent) {
    if (mantissa == cplx{}) return;
    m.push_back(mantissa);
    e.push_back(exponent);
  }
  ScaledComplex result() const {
    if (m.empty()) return {};
    double E = -INFINITY;
    for (double x : e) E = std::max(E, x);
    cplx s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * std::exp(e[i] - E);
    if (s == cplx{}) return {};
    return ScaledComplex{s, E}.normalized();
  }
};

WeightedRule airy_square_rule(const Potential& V, const SpectralPoint& lam, int order) {
  const cplx k = lam.k();
  const double decay = lam.modulus() >= 4.0 ? 2.0 * k.imag() : 0.0;
  return oscillatory_potential_rule(V, 2.0 * std::abs(k), decay, order);
}

template <class Term>
ScaledComplex airy_integral(const Potential& V, const SpectralPoint& lam, Term term, const char* name) {
  if (V.is_zero()) return {};
  auto eval = [&](int order) {
    WeightedRule r = airy_square_rule(V, lam, order);
    ScaledSum s;
    for (std::size_t j = 0; j < r.x.size(); ++j) {
      const AiryPair a = airy_ai(r.x[j] - lam.lambda());
      term(s, r.omega[j], a);
    }
    return s.result();
  };
  const ScaledComplex lo = eval(20);
  const ScaledComplex hi = eval(28);
  if (!hi.is_zero()) {
    const double rel = std::abs((hi - lo).mantissa) * std::exp((hi - lo).exponent - hi.exponent) /
                       std::abs(hi.mantissa);
    if ((hi - lo).is_zero() ? false : rel > 1e-8)
      throw AccuracyError(std::string(name) + ": quadrature did not settle", rel);
  }
  return hi;
}

}  // namespace

ScaledComplex xi(const SpectralPoint& lambda) {
  return ScaledComplex::from_log(-I * lambda.z() - std::log(2.0 * lambda.k()));
}

ScaledComplex a0_scaled(const Potential& V, const SpectralPoint& lambda) {
  ScaledComplex v = airy_integral(
      V, lambda,
      [](ScaledSum& s, double om, const AiryPair& a) { s.add(om * a.f * a.f, 2.0 * a.exponent); }, "a0");
  return v * ScaledComplex{-2.0 * pi * I};
}

cplx a0(const Potential& V, cplx lambda) { return a0_scaled(V, SpectralPoint(lambda)).value(); }

ScaledComplex a0_derivative_scaled(const Potential& V, const SpectralPoint& lambda) {
  ScaledComplex v = airy_integral(
      V, lambda,
      [](ScaledSum& s, double om, const AiryPair& a) { s.add(om * a.f * a.fp, 2.0 * a.exponent); },
      "a0_derivative");
  return v * ScaledComplex{4.0 * pi * I};
}

ScaledComplex big_x_scaled(const Potential& V, const SpectralPoint& lambda) {
  ScaledComplex v = airy_integral(
      V, lambda,
      [](ScaledSum& s, double om, const AiryPair& a) { s.add(std::abs(om) * std::norm(a.f), 2.0 * a.exponent); },
      "big_x");
  return v * ScaledComplex{2.0 * pi};
}

double big_x(const Potential& V, cplx lambda) { return big_x_scaled(V, SpectralPoint(lambda)).value().real(); }

double psi_norm_sq(const Potential& V, cplx lambda, const NystromGrid& grid) {
  (void)V;
  double s = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const AiryPair a = airy_ai(grid.nodes[j] - lambda);
    s += std::abs(grid.omega[j]) * std::norm(a.f) * std::exp(2.0 * a.exponent);
  }
  return s;
}

ScaledComplex a1_scaled(const Potential& V, cplx lambda, const NystromGrid& grid) {
  if (V.is_zero()) return {};
  NystromSystem sys(V, lambda, grid);
  const auto& ai = sys.ai_nodes();
  const int n = static_cast<int>(grid.size());
  double E0 = -INFINITY;
  for (const auto& a : ai) E0 = std::max(E0, a.exponent);
  Eigen::VectorXcd psi(n), psis(n);
  for (int j = 0; j < n; ++j) {
    const double sq = std::sqrt(std::abs(grid.omega[j]));
    psi(j) = ai[j].f * std::exp(ai[j].exponent - E0) * sq;
    psis(j) = grid.omega[j] < 0.0 ? -psi(j) : psi(j);
  }
  Eigen::MatrixXcd M = sys.symmetrized();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Eigen::MatrixXcd::Identity(n, n) + M);
  if (!(lu.rcond() > 1e-15)) throw SingularError("a1: I + Y0 is numerically singular");
  // Y psi = psi - (I + M)^{-1} psi
  const Eigen::VectorXcd ypsi = psi - lu.solve(psi);
  const cplx form = psis.transpose() * ypsi;
  return ScaledComplex{2.0 * pi * I * form, 2.0 * E0}.normalized();
}

SMatrixSample s_matrix(const Potential& V, cplx lambda, const SMatrixOptions& opt) {
  return s_matrix(V, SpectralPoint(lambda), opt);
}

SMatrixSample s_matrix(const Potential& V, const SpectralPoint& lam, const SMatrixOptions& opt) {
  SMatrixSample out{lam, {}, {}, false, {}, {}, {}, {}, -1.0, 0};
  out.xi = xi(lam);
  if (V.is_zero()) {
    out.s_stationary = ScaledComplex{1.0};
    out.s_det_ratio = ScaledComplex{1.0};
    out.det_ratio_available = true;
    out.y_norm = opt.y_norm ? 0.0 : -1.0;
    return out;
  }
  const cplx lambda = lam.lambda();
  const GridSpec spec = opt.grid ? *opt.grid : default_grid_spec(V, lambda);
  const NystromGrid grid = make_grid(V, spec);
  out.grid_size = static_cast<int>(grid.size());
  NystromSystem sys(V, lambda, grid, Branch::plus);

  const auto& ai = sys.ai_nodes();
  const int n = static_cast<int>(grid.size());
  double E0 = -INFINITY;
  for (const auto& a : ai) E0 = std::max(E0, a.exponent);
  Eigen::VectorXcd f(n);
  for (int j = 0; j < n; ++j) f(j) = ai[j].f * std::exp(ai[j].exponent - E0);
  const Eigen::VectorXcd u = sys.solve(f);
  cplx s1 = 0.0, s0 = 0.0;
  for (int j = 0; j < n; ++j) {
    s1 += grid.omega[j] * f(j) * u(j);
    s0 += grid.omega[j] * f(j) * f(j);
  }
  // S - 1 = -2 pi i int Ai V u; the Born term is replaced by the accurate A0
  out.a1 = ScaledComplex{-2.0 * pi * I * (s1 - s0), 2.0 * E0}.normalized();
  out.a0 = a0_scaled(V, lam);
  out.s_stationary = ScaledComplex{1.0} + out.a0 + out.a1;
  out.x_bound = big_x_scaled(V, lam);

  if (opt.det_ratio) {
    const DeterminantSample dp = fredholm_det(V, lambda, grid, Branch::plus);
    if (!dp.det.is_zero()) {
      const DeterminantSample dm = fredholm_det(V, lambda, grid, Branch::minus);
      out.s_det_ratio = dm.det / dp.det;
      out.det_ratio_available = std::isfinite(out.s_det_ratio.exponent);
    }
  }
  if (opt.y_norm) {
    Eigen::MatrixXcd M = sys.symmetrized();
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Identity(n, n) -
                         (Eigen::MatrixXcd::Identity(n, n) + M).partialPivLu().inverse();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Y);
    out.y_norm = svd.singularValues()(0);
  }
  return out;
}

SmallAngleExpansion small_angle_expansion(const Potential& V, cplx lambda, double eps) {
  const SpectralPoint lam(lambda);
  if (lam.phi() > eps) throw std::domain_error("small_angle_expansion: arg lambda exceeds eps");
  const cplx k = lam.k();
  WeightedRule r = airy_square_rule(V, lam, 24);
  double v0 = 0.0;
  cplx corr = 0.0;
  for (std::size_t j = 0; j < r.x.size(); ++j) {
    v0 += r.omega[j];
    const cplx Phi = 4.0 / 3.0 * k * k * k - 2.0 * r.x[j] * k;
    corr += r.omega[j] * std::sin(Phi);
  }
  return {-I * v0 / k, -I / k * corr};
}

namespace {

struct PolarKey {
  double r, phi;
  bool operator<(const PolarKey& o) const { return r < o.r || (r == o.r && phi < o.phi); }
};

class ScanEvaluator {
 public:
  ScanEvaluator(const Potential& V) : V_(V) {}

  ScaledComplex s_at(double r, double phi) {
    auto it = cache_.find({r, phi});
    if (it != cache_.end()) return it->second;
    SMatrixOptions o;
    o.det_ratio = false;
    const ScaledComplex s = s_matrix(V_, SpectralPoint::polar(r, phi), o).s_stationary;
    cache_.emplace(PolarKey{r, phi}, s);
    return s;
  }
  std::size_t evaluations() const { return cache_.size(); }

 private:
  const Potential& V_;
  std::map<PolarKey, ScaledComplex> cache_;
};

double wrap(double d) {
  while (d > pi) d -= 2 * pi;
  while (d <= -pi) d += 2 * pi;
  return d;
}

}  // namespace

ScanReport forbidden_domain_scan(const Potential& V, const ScanSpec& spec) {
  if (spec.phi_min < 0.0 || spec.phi_max > pi + 1e-12 || spec.phi_min >= spec.phi_max)
    throw std::invalid_argument("scan.phi: sector must lie within [0, pi]");
  if (!(spec.r_min > 0.0 && spec.r_max > spec.r_min)) throw std::invalid_argument("scan.r: need 0 < r_min < r_max");
  if (spec.n_phi < 1 || spec.n_r < 1) throw std::invalid_argument("scan: cell counts must be >= 1");

  const int nc = spec.n_phi * spec.n_r;
  std::vector<ScanCell> cells(nc);
  std::vector<std::size_t> evals(nc);
  parallel_for(static_cast<std::size_t>(nc), [&](std::size_t idx) {
    ScanEvaluator ev(V);
    const int ip = static_cast<int>(idx) / spec.n_r, ir = static_cast<int>(idx) % spec.n_r;
    ScanCell c;
    c.phi0 = spec.phi_min + (spec.phi_max - spec.phi_min) * ip / spec.n_phi;
    c.phi1 = spec.phi_min + (spec.phi_max - spec.phi_min) * (ip + 1) / spec.n_phi;
    c.r0 = spec.r_min + (spec.r_max - spec.r_min) * ir / spec.n_r;
    c.r1 = spec.r_min + (spec.r_max - spec.r_min) * (ir + 1) / spec.n_r;
    const double rc = 0.5 * (c.r0 + c.r1), pc = 0.5 * (c.phi0 + c.phi1);
    c.center = std::polar(rc, pc);
    const bool growth = std::sin(1.5 * pc) > 0.0;

    auto h_arg = [&](double r, double phi) {
      ScaledComplex s = ev.s_at(r, phi);
      if (growth) s = s / xi(SpectralPoint::polar(r, phi));
      return std::arg(s.mantissa);
    };
    double total = 0.0;
    // counterclockwise: r0->r1 at phi0, phi0->phi1 at r1, r1->r0 at phi1, phi1->phi0 at r0
    auto edge = [&](double ra, double pa, double rb, double pb) {
      struct Seg { double t0, t1, a0, a1; int depth; };
      auto pt = [&](double t, double& r, double& p) {
        r = ra + (rb - ra) * t;
        p = pa + (pb - pa) * t;
      };
      std::vector<Seg> stack;
      const int m = 4;
      double prev_t = 0.0, r, p;
      pt(0.0, r, p);
      double prev_a = h_arg(r, p);
      for (int q = 1; q <= m; ++q) {
        const double t = double(q) / m;
        pt(t, r, p);
        stack.push_back({prev_t, t, prev_a, h_arg(r, p), 0});
        prev_t = t;
        prev_a = stack.back().a1;
      }
      // process left to right
      std::vector<Seg> work(stack.rbegin(), stack.rend());
      while (!work.empty()) {
        Seg s = work.back();
        work.pop_back();
        const double d = wrap(s.a1 - s.a0);
        if (std::abs(d) > pi / 4 && s.depth < spec.max_depth) {
          const double tm = 0.5 * (s.t0 + s.t1);
          pt(tm, r, p);
          const double am = h_arg(r, p);
          work.push_back({tm, s.t1, am, s.a1, s.depth + 1});
          work.push_back({s.t0, tm, s.a0, am, s.depth + 1});
          continue;
        }
        total += d;
      }
    };
    edge(c.r0, c.phi0, c.r1, c.phi0);
    edge(c.r1, c.phi0, c.r1, c.phi1);
    edge(c.r1, c.phi1, c.r0, c.phi1);
    edge(c.r0, c.phi1, c.r0, c.phi0);
    c.winding = static_cast<int>(std::lround(total / (2 * pi)));

    const SpectralPoint lc = SpectralPoint::polar(rc, pc);
    const ScaledComplex sc = ev.s_at(rc, pc);
    c.log_abs_s = sc.log_abs();
    c.log_bound_ratio = (sc - ScaledComplex{1.0}).log_abs() - xi(lc).log_abs();
    cells[idx] = c;
    evals[idx] = ev.evaluations();
  });

  ScanReport rep;
  rep.cells = std::move(cells);
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const ScanCell& c = rep.cells[i];
    rep.total_winding += c.winding;
    if (c.winding != 0) ++rep.cells_with_winding;
    rep.min_log_abs_s = std::min(rep.min_log_abs_s, c.log_abs_s);
    rep.max_log_abs_s = std::max(rep.max_log_abs_s, c.log_abs_s);
    rep.max_log_bound_ratio = std::max(rep.max_log_bound_ratio, c.log_bound_ratio);
    rep.evaluations += evals[i];
  }
  return rep;
}

}  // namespace stark
