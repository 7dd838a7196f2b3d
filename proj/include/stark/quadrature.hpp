#pragma once

#include <vector>

namespace stark {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre on [-1, 1].
const GaussRule& gauss_legendre(int n);

/// n-point Gauss-Jacobi on [-1, 1] for the weight (1-t)^alpha (1+t)^beta,
/// alpha, beta > -1. Golub-Welsch.
GaussRule gauss_jacobi(int n, double alpha, double beta);

/// Rule for int_0^h x^beta f(x) dx, nodes in (0, h).
GaussRule jacobi_endpoint_rule(int n, double beta, double h);

/// Rule for int_a^b f(x) dx.
GaussRule legendre_on(int n, double a, double b);

/// Panel breakpoints for an integrand on [0, length] that oscillates and/or
/// decays like e^{i kappa x}: panels never exceed width_factor / |kappa|, and
/// grow geometrically (ratio 2) out of the first panel [0, first].
std::vector<double> oscillatory_breaks(double length, double kappa_abs, double first,
                                       double width_factor = 6.0);

}  // namespace stark
