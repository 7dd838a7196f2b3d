#pragma once

#include <optional>
#include <vector>

#include "stark/branchcut.hpp"
#include "stark/determinant.hpp"
#include "stark/potential.hpp"
#include "stark/scaled.hpp"

namespace stark {

/// xi(lambda) = e^{-i(4/3)lambda^{3/2}} / (2 sqrt(lambda)), in log form.
ScaledComplex xi(const SpectralPoint& lambda);

/// A0(lambda) = -2 pi i int Ai(x - lambda)^2 V(x) dx.
ScaledComplex a0_scaled(const Potential& V, const SpectralPoint& lambda);
cplx a0(const Potential& V, cplx lambda);

/// dA0/dlambda = 4 pi i int Ai Ai' V.
ScaledComplex a0_derivative_scaled(const Potential& V, const SpectralPoint& lambda);

/// X(lambda) = 2 pi int |Ai(x - lambda)|^2 |V(x)| dx; mantissa is real.
ScaledComplex big_x_scaled(const Potential& V, const SpectralPoint& lambda);
double big_x(const Potential& V, cplx lambda);

/// ||Psi(lambda)||^2 = sum |Ai(x_j - lambda)|^2 |omega_j| on a Nystrom grid.
double psi_norm_sq(const Potential& V, cplx lambda, const NystromGrid& grid);

/// A1 = 2 pi i Psi V_S Y Psi with Psi_j = Ai(x_j - lambda) |omega_j|^{1/2}.
ScaledComplex a1_scaled(const Potential& V, cplx lambda, const NystromGrid& grid);

struct SMatrixOptions {
  std::optional<GridSpec> grid;  // default_grid_spec when empty
  bool det_ratio = true;
  bool y_norm = false;
};

struct SMatrixSample {
  SpectralPoint lambda;
  ScaledComplex s_stationary;
  /// D-(lambda) / D+(lambda); not available when the minus kernel overflows
  ScaledComplex s_det_ratio;
  bool det_ratio_available = false;
  ScaledComplex a0, a1;
  ScaledComplex x_bound;
  ScaledComplex xi;
  double y_norm = -1.0;  // spectral norm of Y, < 0 when not requested
  int grid_size = 0;

  cplx s() const { return s_stationary.value(); }
};

SMatrixSample s_matrix(const Potential& V, cplx lambda, const SMatrixOptions& opt = {});
SMatrixSample s_matrix(const Potential& V, const SpectralPoint& lambda, const SMatrixOptions& opt = {});

struct SmallAngleExpansion {
  cplx leading;     // -i V0 / k
  cplx correction;  // -(i/k) int V sin(Phi)
};

/// Throws std::domain_error when arg lambda > eps.
SmallAngleExpansion small_angle_expansion(const Potential& V, cplx lambda, double eps = 0.2);

struct ScanSpec {
  double phi_min = 0.0, phi_max = pi;
  double r_min = 30.0, r_max = 120.0;
  int n_phi = 6, n_r = 8;
  int max_depth = 8;
};

struct ScanCell {
  double r0, r1, phi0, phi1;
  cplx center;
  double log_abs_s;        // at the cell center
  double log_bound_ratio;  // log |S - 1| - log |xi| at the center
  int winding;
};

struct ScanReport {
  std::vector<ScanCell> cells;
  int total_winding = 0;
  int cells_with_winding = 0;
  double min_log_abs_s = INFINITY;
  double max_log_abs_s = -INFINITY;
  double max_log_bound_ratio = -INFINITY;
  std::size_t evaluations = 0;
};

/// Polar-cell argument-principle census of S over the sector. The phase is
/// tracked on S / xi where sin(3 phi / 2) > 0 and on S elsewhere.
ScanReport forbidden_domain_scan(const Potential& V, const ScanSpec& spec);

}  // namespace stark
