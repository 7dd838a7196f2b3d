#pragma once

#include <cmath>
#include <complex>

namespace stark {

/// Complex number stored as mantissa * e^{exponent} so values like
/// e^{+-2000} stay representable. The mantissa carries the phase.
struct ScaledComplex {
  std::complex<double> mantissa{0.0, 0.0};
  double exponent = 0.0;

  ScaledComplex() = default;
  ScaledComplex(std::complex<double> m, double e = 0.0) : mantissa(m), exponent(e) {}

  static ScaledComplex from_log(std::complex<double> log_value) {
    return {std::polar(1.0, log_value.imag()), log_value.real()};
  }

  bool is_zero() const { return mantissa == std::complex<double>{}; }
  double log_abs() const {
    return is_zero() ? -INFINITY : std::log(std::abs(mantissa)) + exponent;
  }
  double arg() const { return std::arg(mantissa); }
  /// Unscaled value; overflows to inf or underflows to 0 outside double range.
  std::complex<double> value() const {
    if (is_zero()) return {};
    return mantissa * std::exp(exponent);
  }

  ScaledComplex normalized() const {
    if (is_zero()) return {};
    double m = std::abs(mantissa);
    double e = std::log(m);
    return {mantissa / m, exponent + e};
  }

  friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
    return ScaledComplex{a.mantissa * b.mantissa, a.exponent + b.exponent}.normalized();
  }
  friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
    return ScaledComplex{a.mantissa / b.mantissa, a.exponent - b.exponent}.normalized();
  }
  friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.exponent >= b.exponent) {
      return ScaledComplex{a.mantissa + b.mantissa * std::exp(b.exponent - a.exponent),
                           a.exponent}
          .normalized();
    }
    return b + a;
  }
  friend ScaledComplex operator-(const ScaledComplex& a) { return {-a.mantissa, a.exponent}; }
  friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) {
    return a + (-b);
  }
};

}  // namespace stark
