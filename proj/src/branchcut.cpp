#include "stark/branchcut.hpp"

#include <cmath>
#include <stdexcept>

namespace stark {

double continued_arg(cplx z) {
  double a = std::arg(z);
  if (a < -pi / 2) a += 2 * pi;
  return a;
}

cplx power_with_arg(double modulus, double arg, double alpha) {
  return std::polar(std::pow(modulus, alpha), alpha * arg);
}

cplx branch_power(cplx lambda, double alpha) {
  if (lambda == cplx{}) throw std::domain_error("branch_power: lambda = 0");
  return power_with_arg(std::abs(lambda), continued_arg(lambda), alpha);
}

cplx minus_ik_power(cplx k, double p) {
  if (k == cplx{}) throw std::domain_error("minus_ik_power: k = 0");
  return std::exp(p * log_minus_ik(k));
}

cplx log_minus_ik(cplx k) {
  if (k == cplx{}) throw std::domain_error("log_minus_ik: k = 0");
  return {std::log(std::abs(k)), continued_arg(k) - pi / 2};
}

SpectralPoint::SpectralPoint(cplx lambda) : SpectralPoint(lambda, continued_arg(lambda)) {}

SpectralPoint::SpectralPoint(cplx lambda, double arg)
    : lambda_(lambda), modulus_(std::abs(lambda)), phi_(arg) {
  if (modulus_ == 0.0) throw std::domain_error("SpectralPoint: lambda = 0");
  k_ = std::polar(std::sqrt(modulus_), phi_ / 2);
  z_ = std::polar(4.0 / 3.0 * std::pow(modulus_, 1.5), 1.5 * phi_);
  s_ = std::sin(1.5 * phi_);
  c_ = std::cos(1.5 * phi_);
}

SpectralPoint SpectralPoint::polar(double modulus, double arg) {
  return SpectralPoint(std::polar(modulus, arg), arg);
}

}  // namespace stark
