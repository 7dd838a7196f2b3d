#pragma once

#include <complex>
#include <numbers>

namespace stark {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Branch arguments live in [-pi/2, 3pi/2): the closed upper half-plane [0, pi]
// plus a margin on each side, so points reached by continuing across the real
// axis keep an argument next to 0 or next to pi instead of wrapping.
double continued_arg(cplx z);

/// |z|^alpha e^{i alpha arg}, with arg supplied explicitly.
cplx power_with_arg(double modulus, double arg, double alpha);

/// lambda^alpha with arg lambda taken by continued_arg (so arg in [0, pi] on
/// the closed upper half-plane). Throws std::domain_error for lambda == 0.
cplx branch_power(cplx lambda, double alpha);

/// (-ik)^p = e^{-i p pi/2} k^p with arg k taken by continued_arg.
/// Throws std::domain_error for k == 0.
cplx minus_ik_power(cplx k, double p);

/// log(-ik) on the same branch: log|k| + i(arg k - pi/2).
cplx log_minus_ik(cplx k);

/// Spectral parameter with its branch data cached.
///
/// The argument phi is stored rather than recomputed, so a point that was
/// reached through continuation just below the positive real axis keeps
/// phi slightly negative, and one just below the negative axis keeps phi
/// slightly above pi.
class SpectralPoint {
 public:
  explicit SpectralPoint(cplx lambda);
  SpectralPoint(cplx lambda, double arg);

  static SpectralPoint polar(double modulus, double arg);

  cplx lambda() const { return lambda_; }
  double modulus() const { return modulus_; }
  double phi() const { return phi_; }
  /// sqrt(lambda), Im k >= 0 for phi in [0, pi].
  cplx k() const { return k_; }
  /// (4/3) lambda^{3/2}.
  cplx z() const { return z_; }
  /// sin(3 phi / 2)
  double s() const { return s_; }
  /// cos(3 phi / 2)
  double c() const { return c_; }

 private:
  cplx lambda_;
  double modulus_;
  double phi_;
  cplx k_;
  cplx z_;
  double s_;
  double c_;
};

}  // namespace stark
