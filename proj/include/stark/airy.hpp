#pragma once

#include <complex>

#include "stark/branchcut.hpp"
#include "stark/scaled.hpp"

namespace stark {

/// A solution of y'' = z y and its derivative, both scaled by e^{-exponent}:
/// true values are (f, fp) * e^{exponent}.
struct AiryPair {
  cplx f{};
  cplx fp{};
  double exponent = 0.0;
  /// Set when the value came out of a cancellation larger than ~1e4, i.e. the
  /// relative accuracy may be worse than the 1e-12 budget (near zeros).
  bool accuracy_loss = false;

  ScaledComplex value() const { return {f, exponent}; }
  ScaledComplex derivative() const { return {fp, exponent}; }
};

/// Ai, Ai', Bi, Bi' at one point. The Ai pair and the Bi pair carry separate
/// exponents: their ratio exceeds the double range once |z| is beyond ~70.
struct AiryValue {
  cplx ai{}, aip{}, bi{}, bip{};
  double ai_exponent = 0.0;
  double bi_exponent = 0.0;
  bool accuracy_loss = false;

  cplx ai_value() const { return ai * std::exp(ai_exponent); }
  cplx aip_value() const { return aip * std::exp(ai_exponent); }
  cplx bi_value() const { return bi * std::exp(bi_exponent); }
  cplx bip_value() const { return bip * std::exp(bi_exponent); }
  /// ai*bip - aip*bi, which equals (1/pi) e^{-(ai_exponent + bi_exponent)}.
  cplx scaled_wronskian() const { return ai * bip - aip * bi; }
};

/// Ai(z), Ai'(z). Throws std::domain_error on non-finite input.
AiryPair airy_ai(cplx z);

/// Bi(z), Bi'(z).
AiryPair airy_bi(cplx z);

AiryValue airy_eval(cplx z);

/// w(t) = Bi(t) + i Ai(t) = 2 e^{i pi/6} Ai(t e^{2 pi i/3}), the solution
/// that is square integrable at -infinity in x when t = x - lambda, Im lambda > 0.
AiryPair airy_outgoing(cplx t);

/// Bi(t) - i Ai(t) = 2 e^{-i pi/6} Ai(t e^{-2 pi i/3}), the companion for Im lambda < 0.
AiryPair airy_incoming(cplx t);

/// Continues a solution of y'' = t y from t = c to t = c + h by its Taylor
/// series at c. Scaling of (y, yp) passes through unchanged.
void airy_taylor_shift(cplx c, cplx h, cplx& y, cplx& yp);

enum class AiryRegime { interior, near_real };

struct AsymptoticSquare {
  ScaledComplex value;
  /// phi lies outside the declared regime's sector for the given epsilon.
  bool regime_mismatch = false;
};

/// Leading behaviour of Ai(x - lambda)^2 for large |lambda| with k = sqrt(lambda),
/// Phi = (4/3)k^3 - 2xk:
///   interior  (phi >= eps): (i / 4 k pi) e^{-i Phi}
///   near_real (phi <= eps): (1 + sin Phi) / (2 pi k)
AsymptoticSquare airy_asymptotic_square(double x, const SpectralPoint& lambda, AiryRegime regime,
                                        double eps = 0.2);

namespace airy_detail {
inline constexpr double maclaurin_radius = 2.0;
inline constexpr double asymptotic_radius = 9.0;
inline constexpr double max_taylor_step = 0.5;
}  // namespace airy_detail

}  // namespace stark
