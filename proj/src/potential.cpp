#include "stark/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stark/fit.hpp"

namespace stark {

SmoothPart SmoothPart::polynomial(std::vector<double> c) {
  SmoothPart s;
  s.kind = Kind::polynomial;
  s.coeffs = std::move(c);
  return s;
}

SmoothPart SmoothPart::piecewise(std::vector<double> breaks,
                                 std::vector<std::vector<double>> coeffs) {
  if (breaks.size() < 2 || coeffs.size() + 1 != breaks.size())
    throw std::invalid_argument("smooth_part.piecewise: need m+1 breaks for m pieces");
  if (!std::is_sorted(breaks.begin(), breaks.end()))
    throw std::invalid_argument("smooth_part.breaks: not increasing");
  SmoothPart s;
  s.kind = Kind::piecewise;
  s.breaks = std::move(breaks);
  s.piece_coeffs = std::move(coeffs);
  return s;
}

SmoothPart SmoothPart::table(std::vector<double> xs, std::vector<double> ys, int order) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("smooth_part.table: xs and ys must match, two or more samples");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw std::invalid_argument("smooth_part.xs: not increasing");
  if (order < 1) throw std::invalid_argument("smooth_part.order: must be >= 1");
  SmoothPart s;
  s.kind = Kind::table;
  s.xs = std::move(xs);
  s.ys = std::move(ys);
  s.order = std::min<int>(order, static_cast<int>(s.xs.size()) - 1);
  return s;
}

namespace {
double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}
}  // namespace

double SmoothPart::operator()(double x) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::polynomial:
      return horner(coeffs, x);
    case Kind::piecewise: {
      if (x < breaks.front() || x > breaks.back()) return 0.0;
      auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
      std::size_t i = std::min<std::size_t>(it - breaks.begin(), breaks.size() - 1);
      i = i == 0 ? 0 : i - 1;
      return horner(piece_coeffs[i], x - breaks[i]);
    }
    case Kind::table: {
      // Lagrange through the order+1 samples around x
      const int n = static_cast<int>(xs.size());
      int j = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
      int lo = std::clamp(j - order / 2, 0, n - order - 1);
      double v = 0.0;
      for (int a = lo; a <= lo + order; ++a) {
        double l = 1.0;
        for (int b = lo; b <= lo + order; ++b)
          if (b != a) l *= (x - xs[b]) / (xs[a] - xs[b]);
        v += l * ys[a];
      }
      return v;
    }
  }
  return 0.0;
}

std::vector<double> SmoothPart::kinks() const {
  if (kind == Kind::piecewise) return {breaks.begin() + 1, breaks.end() - 1};
  if (kind == Kind::table && xs.size() > 2) return {xs.begin() + 1, xs.end() - 1};
  return {};
}

bool SmoothPart::is_zero() const {
  auto allzero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double c) { return c == 0.0; });
  };
  switch (kind) {
    case Kind::zero:
      return true;
    case Kind::polynomial:
      return allzero(coeffs);
    case Kind::piecewise:
      return std::all_of(piece_coeffs.begin(), piece_coeffs.end(), allzero);
    case Kind::table:
      return allzero(ys);
  }
  return true;
}

double Potential::operator()(double x) const {
  if (x < 0.0 || x > gamma) return 0.0;
  if (x == 0.0 && c_star != 0.0) return std::copysign(std::numeric_limits<double>::infinity(), c_star);
  double v = smooth(x);
  if (c_star != 0.0) v += c_star * std::pow(x, p - 1.0);
  return v;
}

double eval_potential(const Potential& V, double x) { return V(x); }

Potential Potential::scaled(double eps) const {
  Potential q = *this;
  q.c_star *= eps;
  for (auto& c : q.smooth.coeffs) c *= eps;
  for (auto& pc : q.smooth.piece_coeffs)
    for (auto& c : pc) c *= eps;
  for (auto& y : q.smooth.ys) y *= eps;
  return q;
}

void Potential::validate(bool require_condition_c) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("potential.gamma: must be a finite positive number");
  if (!std::isfinite(c_star)) throw std::invalid_argument("potential.c_star: must be finite");
  if (c_star != 0.0 || require_condition_c) {
    if (!(p > 0.5 && p < 1.0)) throw std::invalid_argument("potential.p: must lie in (1/2, 1)");
    if (!(nu > p)) throw std::invalid_argument("potential.nu: must exceed p");
  }
  if (require_condition_c && c_star == 0.0)
    throw std::invalid_argument("potential.c_star: must be nonzero for this task");
  if (smooth.kind == SmoothPart::Kind::piecewise &&
      (smooth.breaks.front() > 0.0 || smooth.breaks.back() < gamma))
    throw std::invalid_argument("potential.smooth_part.breaks: must cover [0, gamma]");
  if (smooth.kind == SmoothPart::Kind::table &&
      (smooth.xs.front() > 0.0 || smooth.xs.back() < gamma))
    throw std::invalid_argument("potential.smooth_part.xs: must cover [0, gamma]");
}

Potential Potential::reference_smooth() {
  Potential V;
  V.gamma = 1.0;
  V.smooth = SmoothPart::polynomial({1.0, 1.0, -1.0});
  return V;
}

Potential Potential::power_law(double c, double p, double gamma) {
  Potential V;
  V.gamma = gamma;
  V.c_star = c;
  V.p = p;
  V.nu = 1.0;
  return V;
}

Potential Potential::constant(double v, double gamma) {
  Potential V;
  V.gamma = gamma;
  V.smooth = SmoothPart::polynomial({v});
  return V;
}

WeightedRule potential_rule(const Potential& V, const std::vector<double>& breaks, int order) {
  WeightedRule r;
  if (V.is_zero()) return r;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (b <= a) continue;
    if (i == 0 && V.singular() && a == 0.0) {
      GaussRule j = jacobi_endpoint_rule(order, V.p - 1.0, b);
      for (int q = 0; q < order; ++q) {
        r.x.push_back(j.nodes[q]);
        r.omega.push_back(V.c_star * j.weights[q]);
      }
      if (!V.smooth.is_zero()) {
        GaussRule l = legendre_on(order, a, b);
        for (int q = 0; q < order; ++q) {
          r.x.push_back(l.nodes[q]);
          r.omega.push_back(V.smooth(l.nodes[q]) * l.weights[q]);
        }
      }
      continue;
    }
    GaussRule l = legendre_on(order, a, b);
    for (int q = 0; q < order; ++q) {
      r.x.push_back(l.nodes[q]);
      r.omega.push_back(V(l.nodes[q]) * l.weights[q]);
    }
  }
  return r;
}

WeightedRule oscillatory_potential_rule(const Potential& V, double kappa_abs, double decay,
                                        int order) {
  double L = V.gamma;
  if (decay > 0.0) L = std::min(L, 41.5 / decay);
  const double first = std::min(L, 1.0 / std::max(1.0, kappa_abs));
  std::vector<double> br = oscillatory_breaks(L, kappa_abs, first);
  for (double k : V.smooth.kinks())
    if (k > 0.0 && k < L) br.push_back(k);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(),
                       [L](double a, double b) { return std::abs(a - b) < 1e-14 * L; }),
           br.end());
  return potential_rule(V, br, order);
}

cplx fourier_half(const Potential& V, cplx k) {
  if (V.is_zero()) return 0.0;
  const double kappa = 2.0 * std::abs(k);
  const double decay = 2.0 * k.imag();
  auto integrate = [&](int order) {
    WeightedRule r = oscillatory_potential_rule(V, kappa, decay, order);
    cplx s = 0.0;
    for (std::size_t j = 0; j < r.x.size(); ++j) s += r.omega[j] * std::exp(2.0 * I * k * r.x[j]);
    return s;
  };
  const cplx a = integrate(20);
  const cplx b = integrate(28);
  const double est = std::abs(a - b);
  if (est > 1e-9 * std::abs(b) + 1e-300)
    throw AccuracyError("fourier_half: quadrature did not settle", est / std::abs(b));
  return b;
}

double l2_norm_sq(const Potential& V) {
  if (V.singular() && V.p <= 0.5) return std::numeric_limits<double>::infinity();
  // V^2 = c^2 x^{2p-2} + 2 c x^{p-1} V1 + V1^2
  double s = 0.0;
  const int n = 24;
  std::vector<double> br{0.0};
  for (double h = V.gamma * 1e-6; h < V.gamma; h *= 4.0) br.push_back(h);
  br.push_back(V.gamma);
  for (double k : V.smooth.kinks()) br.push_back(k);
  std::sort(br.begin(), br.end());
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = br[i], b = br[i + 1];
    if (b <= a) continue;
    if (i == 0 && V.singular()) {
      GaussRule j = jacobi_endpoint_rule(n, 2.0 * V.p - 2.0, b);
      for (int q = 0; q < n; ++q) {
        const double x = j.nodes[q];
        const double v1 = V.smooth(x);
        const double t = V.c_star + std::pow(x, 1.0 - V.p) * v1;
        s += j.weights[q] * t * t;
      }
      continue;
    }
    GaussRule l = legendre_on(n, a, b);
    for (int q = 0; q < n; ++q) {
      const double v = V(l.nodes[q]);
      s += l.weights[q] * v * v;
    }
  }
  return s;
}

double l1_norm(const Potential& V) {
  if (V.is_zero()) return 0.0;
  // |V| may change sign inside a panel; a fine graded grid keeps that error small.
  std::vector<double> br{0.0};
  for (double h = V.gamma * 1e-8; h < V.gamma / 64; h *= 4.0) br.push_back(h);
  for (int i = 1; i <= 64; ++i) br.push_back(V.gamma * i / 64.0);
  WeightedRule r = potential_rule(V, br, 16);
  double s = 0.0;
  for (std::size_t j = 0; j < r.x.size(); ++j) s += std::abs(r.omega[j]);
  return s;
}

GammaIntegralCheck gamma_integral_check(double p, double gamma, cplx k) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("gamma_integral_check: p must lie in (0, 1)");
  if (std::abs(k) < 1.0) throw std::invalid_argument("gamma_integral_check: |k| must be >= 1");
  Potential V = Potential::power_law(1.0, p, gamma);
  // e^{ikx} = e^{2ix(k/2)}
  auto integrate = [&](int order) {
    WeightedRule r = oscillatory_potential_rule(V, std::abs(k), k.imag(), order);
    cplx s = 0.0;
    for (std::size_t j = 0; j < r.x.size(); ++j) s += r.omega[j] * std::exp(I * k * r.x[j]);
    return s;
  };
  const cplx a = integrate(20);
  const cplx lhs = integrate(28);
  if (std::abs(a - lhs) > 1e-9 * std::abs(lhs))
    throw AccuracyError("gamma_integral_check: quadrature did not settle",
                        std::abs(a - lhs) / std::abs(lhs));
  GammaIntegralCheck c;
  c.lhs = lhs;
  c.rhs = std::tgamma(p) / minus_ik_power(k, p);
  c.residual = std::abs(c.lhs - c.rhs) * std::abs(k);
  return c;
}

double condition_c_constant(const Potential& V) { return V.c_star * std::tgamma(V.p); }

ConditionCFit condition_c_fit(const Potential& V, const std::vector<cplx>& k_grid) {
  if (k_grid.size() < 4) throw FitError("condition_c_fit: need at least four k values");
  double kmin = INFINITY, kmax = 0.0;
  for (cplx k : k_grid) {
    kmin = std::min(kmin, std::abs(k));
    kmax = std::max(kmax, std::abs(k));
  }
  if (!(kmax >= 10.0 * kmin)) throw FitError("condition_c_fit: k grid spans less than one decade");

  std::vector<cplx> q;
  std::vector<double> lk, lf;
  for (cplx k : k_grid) {
    const cplx f = fourier_half(V, k);
    q.push_back(f * minus_ik_power(2.0 * k, V.p));
    lk.push_back(std::log(std::abs(k)));
    lf.push_back(std::log(std::max(std::abs(f), 1e-300)));
  }

  ConditionCFit out{};
  double best = INFINITY;
  for (double mu = 0.02; mu <= 3.0 + 1e-12; mu += 0.01) {
    // minimize sum |q - C - D t|^2, t = |k|^{-mu}
    double s0 = 0, s1 = 0, s2 = 0;
    cplx sq = 0, stq = 0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double t = std::exp(-mu * lk[j]);
      s0 += 1;
      s1 += t;
      s2 += t * t;
      sq += q[j];
      stq += t * q[j];
    }
    const double det = s0 * s2 - s1 * s1;
    if (det <= 0) continue;
    const cplx C = (s2 * sq - s1 * stq) / det;
    const cplx D = (s0 * stq - s1 * sq) / det;
    double res = 0;
    for (std::size_t j = 0; j < q.size(); ++j) res += std::norm(q[j] - C - D * std::exp(-mu * lk[j]));
    if (res < best) {
      best = res;
      out.c_p_estimate = C;
      out.remainder_exponent = -mu;
    }
  }
  out.effective_p = -fit_line(lk, lf).slope;
  out.satisfied = V.c_star != 0.0 && std::abs(out.effective_p - V.p) < 0.15 &&
                  std::abs(out.c_p_estimate) > 1e-8;
  return out;
}

}  // namespace stark
