#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "stark/branchcut.hpp"
#include "stark/quadrature.hpp"

namespace stark {

struct AccuracyError : std::runtime_error {
  double achieved;
  AccuracyError(const std::string& what, double achieved_estimate)
      : std::runtime_error(what), achieved(achieved_estimate) {}
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bounded part V1 of the potential on [0, gamma].
struct SmoothPart {
  enum class Kind { zero, polynomial, piecewise, table };
  Kind kind = Kind::zero;
  std::vector<double> coeffs;                     // polynomial, ascending powers of x
  std::vector<double> breaks;                     // piecewise: b_0 < ... < b_m
  std::vector<std::vector<double>> piece_coeffs;  // piecewise: powers of (x - b_i)
  std::vector<double> xs, ys;                     // table samples
  int order = 3;                                  // table: local Lagrange degree

  static SmoothPart zero() { return {}; }
  static SmoothPart polynomial(std::vector<double> c);
  static SmoothPart piecewise(std::vector<double> breaks, std::vector<std::vector<double>> coeffs);
  static SmoothPart table(std::vector<double> xs, std::vector<double> ys, int order);

  double operator()(double x) const;
  /// Interior points where the representation changes form.
  std::vector<double> kinks() const;
  bool is_zero() const;
};

/// V(x) = c_star x^{p-1} + V1(x) on (0, gamma], 0 elsewhere.
struct Potential {
  double gamma = 1.0;
  double c_star = 0.0;
  double p = 0.75;
  double nu = 1.0;
  SmoothPart smooth;

  double operator()(double x) const;
  double smooth_value(double x) const { return smooth(x); }
  bool singular() const { return c_star != 0.0; }
  bool is_zero() const { return c_star == 0.0 && smooth.is_zero(); }
  Potential scaled(double eps) const;
  /// Throws std::invalid_argument with a field name when out of domain.
  void validate(bool require_condition_c = false) const;

  /// gamma = 1, V1(x) = 1 + x - x^2.
  static Potential reference_smooth();
  /// c x^{p-1} on [0, gamma].
  static Potential power_law(double c, double p, double gamma = 1.0);
  static Potential constant(double v, double gamma = 1.0);
};

double eval_potential(const Potential& V, double x);

/// Nodes and V-weighted weights: sum omega_j f(x_j) approximates int V f.
struct WeightedRule {
  std::vector<double> x;
  std::vector<double> omega;
};

/// V-weighted composite rule over the panels given by breaks (which must start
/// at 0). The first panel carries the x^{p-1} factor in a Gauss-Jacobi rule.
WeightedRule potential_rule(const Potential& V, const std::vector<double>& breaks, int order);

/// Rule adapted to integrands oscillating like e^{i kappa x} with |kappa|
/// given, truncated where e^{-decay x} drops below 1e-18.
WeightedRule oscillatory_potential_rule(const Potential& V, double kappa_abs, double decay,
                                        int order = 20);

/// int_0^gamma e^{2ixk} V(x) dx. Throws AccuracyError when two rule orders
/// disagree beyond 1e-9 relative.
cplx fourier_half(const Potential& V, cplx k);

/// int_0^gamma V(x)^2 dx.
double l2_norm_sq(const Potential& V);
double l1_norm(const Potential& V);

struct GammaIntegralCheck {
  cplx lhs, rhs;
  double residual;
};

/// lhs = int_0^gamma e^{ikx} x^{p-1} dx, rhs = Gamma(p) / (-ik)^p,
/// residual = |lhs - rhs| |k|.
GammaIntegralCheck gamma_integral_check(double p, double gamma, cplx k);

struct ConditionCFit {
  cplx c_p_estimate;
  double remainder_exponent;
  /// -d log|transform| / d log|k|.
  double effective_p;
  bool satisfied;
};

/// Fits fourier_half(V, k) (-i2k)^p = C + D |k|^{-mu}.
ConditionCFit condition_c_fit(const Potential& V, const std::vector<cplx>& k_grid);

/// C_p = c_star Gamma(p).
double condition_c_constant(const Potential& V);

}  // namespace stark
