#pragma once

#include <vector>

#include "stark/branchcut.hpp"
#include "stark/potential.hpp"
#include "stark/roots.hpp"

namespace stark {

struct AsymptoticConstants {
  double p = 0.75;
  cplx c_p;
  double b = 0.0;       // (p + 1) / 3
  cplx z_star_plus;     // (pi/2)(p + 2) + i log(6^b / C_p)
  cplx z_star_minus;    // z_star_plus - b pi
  int r = 1;            // first index with |u_r| < 0.1
  double rho_r = 0.0;   // pi(2r - 1) + Re z*+ - b pi / 2

  static AsymptoticConstants from(double p, cplx c_p);
  /// From Condition C data: C_p = c_star Gamma(p).
  static AsymptoticConstants from(const Potential& V);

  ModelParams model() const { return {b, z_star_plus, std::nullopt}; }
};

/// lambda_n = (+-3 pi n / 2)^{2/3} (1 +- (i b log(2 pi n) + z*^{+-}) / (3 pi n)).
/// Throws std::out_of_range for n < consts.r.
cplx predicted_resonance(const AsymptoticConstants& consts, int n, Family family);

/// z_n^o + z*^{+-} + i b u_n, u_n = (i y_n^o + z*^{+-}) / x_n^o.
cplx predicted_model_root(const ModelParams& params, int n, Family family);

/// (4 / (3 pi)) r^{3/2}
double counting_prediction(double r);
/// (2 / pi) gamma r^{1/2}
double zworski_count(double r, double gamma);

struct SequenceReport {
  std::vector<int> n;
  std::vector<double> abs_error;
  double exponent = 0.0;   // fitted slope of log error vs log n
  double constant = 0.0;   // e^{intercept}
  double rms_residual = 0.0;
};

/// Fit of log |lambda_n - prediction| against log n. Throws
/// std::invalid_argument for fewer than 10 records.
SequenceReport compare_sequences(const std::vector<ResonanceRecord>& computed, const AsymptoticConstants& consts);
SequenceReport fit_decay(const std::vector<int>& n, const std::vector<double>& err);

}  // namespace stark
