#include "stark/asympt.hpp"

#include <cmath>
#include <stdexcept>

#include "stark/fit.hpp"

namespace stark {

AsymptoticConstants AsymptoticConstants::from(double p, cplx c_p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("asympt.p: must lie in (0, 1)");
  if (c_p == cplx{}) throw std::invalid_argument("asympt.c_p: must be nonzero");
  AsymptoticConstants c;
  c.p = p;
  c.c_p = c_p;
  c.b = (p + 1.0) / 3.0;
  // 2k = (6z)^{1/3} for z = (4/3) lambda^{3/2}
  c.z_star_plus = pi / 2.0 * (p + 2.0) + I * std::log(std::pow(6.0, c.b) / c_p);
  c.z_star_minus = c.z_star_plus - c.b * pi;
  int r = 1;
  for (;; ++r) {
    const double x = 2.0 * pi * r, y = c.b * std::log(x);
    const double u = std::max(std::abs(I * y + c.z_star_plus), std::abs(I * y + c.z_star_minus)) / x;
    if (u < 0.1) break;
  }
  c.r = r;
  c.rho_r = pi * (2.0 * r - 1.0) + c.z_star_plus.real() - c.b * pi / 2.0;
  return c;
}

AsymptoticConstants AsymptoticConstants::from(const Potential& V) {
  if (!V.singular()) throw std::invalid_argument("asympt: potential has no x^{p-1} endpoint term (c_star = 0)");
  return from(V.p, condition_c_constant(V));
}

cplx predicted_resonance(const AsymptoticConstants& c, int n, Family family) {
  if (n < c.r) throw std::out_of_range("predicted_resonance: n below the asymptotic regime start r");
  const double sgn = family_sign(family);
  const cplx lead = family == Family::plus ? cplx(std::pow(1.5 * pi * n, 2.0 / 3.0))
                                           : branch_power(cplx(-1.5 * pi * n), 2.0 / 3.0);
  const cplx zs = family == Family::plus ? c.z_star_plus : c.z_star_minus;
  return lead * (1.0 + sgn * (I * c.b * std::log(2.0 * pi * n) + zs) / (3.0 * pi * n));
}

cplx predicted_model_root(const ModelParams& params, int n, Family family) {
  const cplx z0 = model_leading(params.b, n, family);
  const cplx zs = params.z_star_for(family);
  const cplx u = (I * z0.imag() + zs) / z0.real();
  return z0 + zs + I * params.b * u;
}

double counting_prediction(double r) {
  if (r < 0.0) throw std::invalid_argument("counting_prediction: r must be >= 0");
  return 4.0 / (3.0 * pi) * std::pow(r, 1.5);
}

double zworski_count(double r, double gamma) {
  if (r < 0.0) throw std::invalid_argument("zworski_count: r must be >= 0");
  return 2.0 / pi * gamma * std::sqrt(r);
}

SequenceReport fit_decay(const std::vector<int>& n, const std::vector<double>& err) {
  if (n.size() != err.size()) throw std::invalid_argument("fit_decay: size mismatch");
  if (n.size() < 10) throw std::invalid_argument("fit_decay: need at least 10 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(err[i] > 0.0)) continue;
    lx.push_back(std::log(double(n[i])));
    ly.push_back(std::log(err[i]));
  }
  if (lx.size() < 10) throw std::invalid_argument("fit_decay: fewer than 10 nonzero errors");
  const LineFit f = fit_line(lx, ly);
  SequenceReport r;
  r.n = n;
  r.abs_error = err;
  r.exponent = f.slope;
  r.constant = std::exp(f.intercept);
  r.rms_residual = f.rms_residual;
  return r;
}

SequenceReport compare_sequences(const std::vector<ResonanceRecord>& computed, const AsymptoticConstants& consts) {
  if (computed.size() < 10) throw std::invalid_argument("compare_sequences: need at least 10 records");
  std::vector<int> n;
  std::vector<double> e;
  for (const auto& rec : computed) {
    n.push_back(rec.n);
    e.push_back(std::abs(rec.lambda - predicted_resonance(consts, rec.n, rec.family)));
  }
  return fit_decay(n, e);
}

}  // namespace stark
