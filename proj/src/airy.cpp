#include "stark/airy.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace stark {
namespace {

using namespace airy_detail;

constexpr double ai0 = 0.355028053887817239260;   // Ai(0)
constexpr double aip0 = 0.258819403792806798405;  // -Ai'(0)
constexpr double sqrt3 = 1.732050807568877293527;
constexpr double sqrt_pi = 1.772453850905516027298;

const cplx omega{-0.5, 0.5 * sqrt3};        // e^{2 pi i / 3}
const cplx omega_bar{-0.5, -0.5 * sqrt3};   // e^{-2 pi i / 3}
const cplx e_pi6{0.5 * sqrt3, 0.5};         // e^{i pi / 6}
const cplx e_5pi6{-0.5 * sqrt3, 0.5};       // e^{5 i pi / 6}

struct Maclaurin {
  cplx f, fp, g, gp;
};

// f = sum 3^k (1/3)_k z^{3k} / (3k)!, g = sum 3^k (2/3)_k z^{3k+1} / (3k+1)!
Maclaurin maclaurin(cplx z) {
  const cplx z2 = z * z;
  const cplx z3 = z2 * z;
  cplx tf = 1.0, tg = z;
  Maclaurin m{1.0, 0.0, z, 1.0};
  for (int k = 1; k < 200; ++k) {
    const double dk = 3.0 * k;
    cplx dfp = tf * z2 / (dk - 1.0);
    cplx dgp = tg * z2 / dk;
    tf *= z3 / ((dk - 1.0) * dk);
    tg *= z3 / (dk * (dk + 1.0));
    m.f += tf;
    m.g += tg;
    m.fp += dfp;
    m.gp += dgp;
    const double scale = std::abs(m.f) + std::abs(m.g) + std::abs(m.fp) + std::abs(m.gp);
    if (std::abs(tf) + std::abs(tg) + std::abs(dfp) + std::abs(dgp) < 1e-18 * scale) break;
  }
  return m;
}

AiryPair maclaurin_ai(cplx z) {
  auto m = maclaurin(z);
  return {ai0 * m.f - aip0 * m.g, ai0 * m.fp - aip0 * m.gp, 0.0, false};
}

AiryPair maclaurin_bi(cplx z) {
  auto m = maclaurin(z);
  return {sqrt3 * (ai0 * m.f + aip0 * m.g), sqrt3 * (ai0 * m.fp + aip0 * m.gp), 0.0, false};
}

struct Coefficients {
  static constexpr int count = 90;
  std::array<double, count> u{}, v{};
  Coefficients() {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < count; ++k) {
      const double dk = k;
      u[k] = u[k - 1] * (6 * dk - 5) * (6 * dk - 3) * (6 * dk - 1) / ((2 * dk - 1) * 216 * dk);
      v[k] = -(6 * dk + 1) / (6 * dk - 1) * u[k];
    }
  }
};

const Coefficients& coefficients() {
  static const Coefficients c;
  return c;
}

// Single-exponential asymptotic form, valid for |arg z| <= 2 pi / 3 at |z| >= 9.
// The series is cut at its smallest term.
AiryPair asymptotic_ai(cplx z) {
  const auto& c = coefficients();
  const cplx sz = std::sqrt(z);
  const cplx zeta = 2.0 / 3.0 * z * sz;
  const cplx inv = -1.0 / zeta;
  cplx su = 1.0, sv = 1.0;
  cplx p = 1.0;
  double last = 1.0;
  for (int k = 1; k < Coefficients::count; ++k) {
    p *= inv;
    const cplx tu = c.u[k] * p;
    const cplx tv = c.v[k] * p;
    const double mag = std::max(std::abs(tu), std::abs(tv));
    if (mag > last) break;
    su += tu;
    sv += tv;
    last = mag;
    if (mag < 1e-17) break;
  }
  const cplx q = std::sqrt(sz);  // z^{1/4}
  const cplx phase = std::exp(cplx{0.0, -zeta.imag()});
  const cplx lead = phase / (2.0 * sqrt_pi);
  return {lead / q * su, -lead * q * sv, -zeta.real(), false};
}

AiryPair combine(cplx a, const AiryPair& x, cplx b, const AiryPair& y, cplx ad, cplx bd) {
  const double e = std::max(x.exponent, y.exponent);
  const double sx = std::exp(x.exponent - e);
  const double sy = std::exp(y.exponent - e);
  AiryPair r;
  const cplx f1 = a * x.f * sx, f2 = b * y.f * sy;
  const cplx d1 = ad * x.fp * sx, d2 = bd * y.fp * sy;
  r.f = f1 + f2;
  r.fp = d1 + d2;
  r.exponent = e;
  const double big = std::max(std::abs(f1), std::abs(f2));
  const double bigd = std::max(std::abs(d1), std::abs(d2));
  r.accuracy_loss = x.accuracy_loss || y.accuracy_loss || std::abs(r.f) < 1e-4 * big ||
                    std::abs(r.fp) < 1e-4 * bigd;
  return r;
}

AiryPair renormalize(AiryPair p) {
  const double m = std::max(std::abs(p.f), std::abs(p.fp));
  if (m > 0.0 && std::isfinite(m)) {
    const double l = std::log(m);
    p.f /= m;
    p.fp /= m;
    p.exponent += l;
  }
  return p;
}

AiryPair step_along(cplx from, cplx to, AiryPair start) {
  const double dist = std::abs(to - from);
  const int steps = std::max(1, static_cast<int>(std::ceil(dist / max_taylor_step)));
  const cplx h = (to - from) / static_cast<double>(steps);
  cplx y = start.f, yp = start.fp;
  cplx c = from;
  for (int i = 0; i < steps; ++i) {
    airy_taylor_shift(c, h, y, yp);
    c = from + h * static_cast<double>(i + 1);
  }
  start.f = y;
  start.fp = yp;
  return renormalize(start);
}

// Ai for Im z >= 0.
AiryPair ai_upper(cplx z) {
  const double r = std::abs(z);
  const double theta = std::arg(z);  // [0, pi]
  if (r <= maclaurin_radius) return maclaurin_ai(z);
  if (r >= asymptotic_radius) {
    if (theta <= 2 * pi / 3) return asymptotic_ai(z);
    // Ai(z) = -omega Ai(omega z) - omega_bar Ai(omega_bar z)
    const AiryPair a = asymptotic_ai(omega * z);
    const AiryPair b = asymptotic_ai(omega_bar * z);
    return combine(-omega, a, -omega_bar, b, -omega_bar, -omega);
  }
  const cplx dir = std::polar(1.0, theta);
  if (theta < pi / 3) {
    // Ai decays outward here; integrate inward from the asymptotic circle.
    const cplx from = asymptotic_radius * dir;
    return step_along(from, z, asymptotic_ai(from));
  }
  const cplx from = maclaurin_radius * dir;
  return step_along(from, z, maclaurin_ai(from));
}

void check_finite(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::domain_error("airy: non-finite argument");
}

AiryPair conj_pair(AiryPair p) {
  p.f = std::conj(p.f);
  p.fp = std::conj(p.fp);
  return p;
}

}  // namespace

void airy_taylor_shift(cplx c, cplx h, cplx& y, cplx& yp) {
  if (h == cplx{}) return;
  const cplx ch2 = c * h * h;
  const cplx h3 = h * h * h;
  // b_n = a_n h^n with a_{n+2} (n+2)(n+1) = c a_n + a_{n-1}
  cplx bm1 = 0.0;      // b_{n-1}
  cplx b0 = y;         // b_n
  cplx b1 = yp * h;    // b_{n+1}
  cplx sum = b0 + b1;
  cplx dsum = b1;      // sum n b_n
  const double ref = std::abs(y) + std::abs(yp * h);
  int small = 0;
  for (int n = 0; n < 400; ++n) {
    const cplx b2 = (ch2 * b0 + h3 * bm1) / static_cast<double>((n + 2) * (n + 1));
    sum += b2;
    dsum += static_cast<double>(n + 2) * b2;
    bm1 = b0;
    b0 = b1;
    b1 = b2;
    const double mag = std::abs(b2) + std::abs(b0);
    if (mag < 1e-18 * (std::abs(sum) + ref)) {
      if (++small >= 2) break;
    } else {
      small = 0;
    }
  }
  y = sum;
  yp = dsum / h;
}

AiryPair airy_ai(cplx z) {
  check_finite(z);
  if (z.imag() == 0.0) z = {z.real(), 0.0};  // drop a negative zero before taking args
  if (z.imag() < 0.0) return conj_pair(ai_upper(std::conj(z)));
  AiryPair r = ai_upper(z);
  if (z.imag() == 0.0) {
    r.f = r.f.real();
    r.fp = r.fp.real();
  }
  return r;
}

AiryPair airy_bi(cplx z) {
  check_finite(z);
  if (std::abs(z) <= maclaurin_radius) return maclaurin_bi(z);
  // Bi(z) = e^{i pi/6} Ai(omega z) + e^{-i pi/6} Ai(omega_bar z)
  const AiryPair a = airy_ai(omega * z);
  const AiryPair b = airy_ai(omega_bar * z);
  AiryPair r = combine(e_pi6, a, std::conj(e_pi6), b, e_5pi6, std::conj(e_5pi6));
  if (z.imag() == 0.0) {
    r.f = r.f.real();
    r.fp = r.fp.real();
  }
  return r;
}

AiryValue airy_eval(cplx z) {
  const AiryPair a = airy_ai(z);
  const AiryPair b = airy_bi(z);
  return {a.f, a.fp, b.f, b.fp, a.exponent, b.exponent, a.accuracy_loss || b.accuracy_loss};
}

AiryPair airy_outgoing(cplx t) {
  check_finite(t);
  AiryPair a = airy_ai(omega * t);
  a.f *= 2.0 * e_pi6;
  a.fp *= 2.0 * e_pi6 * omega;
  return a;
}

AiryPair airy_incoming(cplx t) {
  check_finite(t);
  AiryPair a = airy_ai(omega_bar * t);
  a.f *= 2.0 * std::conj(e_pi6);
  a.fp *= 2.0 * std::conj(e_pi6) * omega_bar;
  return a;
}

AsymptoticSquare airy_asymptotic_square(double x, const SpectralPoint& lambda, AiryRegime regime,
                                        double eps) {
  const cplx k = lambda.k();
  const cplx Phi = 4.0 / 3.0 * k * k * k - 2.0 * x * k;
  AsymptoticSquare out;
  const double phi = lambda.phi();
  if (regime == AiryRegime::interior) {
    out.regime_mismatch = phi < eps;
    // (i / 4 k pi) e^{-i Phi}
    out.value = ScaledComplex{I / (4.0 * k * pi)} * ScaledComplex::from_log(-I * Phi);
  } else {
    out.regime_mismatch = std::abs(phi) > eps;
    // (1 + sin Phi) / (2 pi k), sin Phi = (e^{i Phi} - e^{-i Phi}) / 2i
    const ScaledComplex sinPhi =
        (ScaledComplex::from_log(I * Phi) - ScaledComplex::from_log(-I * Phi)) *
        ScaledComplex{1.0 / (2.0 * I)};
    out.value = (ScaledComplex{1.0} + sinPhi) * ScaledComplex{1.0 / (2.0 * pi * k)};
  }
  return out;
}

}  // namespace stark
