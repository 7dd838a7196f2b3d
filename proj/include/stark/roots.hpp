#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stark/branchcut.hpp"
#include "stark/determinant.hpp"
#include "stark/potential.hpp"
#include "stark/scaled.hpp"

namespace stark {

enum class Family { plus, minus };

inline int family_sign(Family f) { return f == Family::plus ? 1 : -1; }
const char* family_name(Family f);
/// "plus"/"+" or "minus"/"-"; throws std::invalid_argument otherwise.
Family parse_family(const std::string& s);

/// z = (4/3) lambda^{3/2}. Throws std::domain_error at 0.
cplx map_lambda_z(const SpectralPoint& lambda);
/// lambda = (3z/4)^{2/3}. The plus family takes arg z from continued_arg,
/// the minus family takes it in [0, 2pi). Throws std::domain_error at 0.
cplx map_z_lambda(cplx z, Family family = Family::plus);

/// g(z) = coef z^{-beta}.
struct Perturbation {
  cplx coef = 1.0;
  double beta = 0.5;
};

struct ModelParams {
  double b = 0.5;
  cplx z_star = 0.0;
  std::optional<Perturbation> g;

  /// Throws std::invalid_argument ("model.*").
  void validate() const;
  /// z*^- = z* - b pi for the minus family.
  cplx z_star_for(Family f) const { return f == Family::plus ? z_star : z_star - b * pi; }
};

/// F(z) = e^{-i(z - z*)} / z^b with arg z from continued_arg.
ScaledComplex f_model(cplx z, const ModelParams& params);

struct ModelRoot {
  int n = 0;
  Family family = Family::plus;
  cplx seed;
  cplx z;
  double residual = 0.0;    // |F - 1 - g|
  double derivative = 0.0;  // |d/dz (F - 1 - g)|
  int iterations = 0;
  bool converged = false;
  bool basin_escape = false;  // root farther than pi from its seed
};

struct NewtonOptions {
  double tol = 1e-12;
  int max_iter = 60;
};

/// z_n^o = 2 pi n + i b log(2 pi n) for the plus family, n -> -n for minus.
cplx model_leading(double b, int n, Family family);

/// Newton on F - 1 - g from z_n^o + z*^{+-} (+ seed_offset).
ModelRoot model_root(const ModelParams& params, int n, Family family, const NewtonOptions& opt = {},
                     cplx seed_offset = 0.0);
/// Roots for n in [n_lo, n_hi]; every index gets an entry, failures are flagged.
std::vector<ModelRoot> model_roots(const ModelParams& params, int n_lo, int n_hi, Family family,
                                   const NewtonOptions& opt = {});

struct Rect {
  double x0, x1, y0, y1;
};

struct FoundRoot {
  cplx z;
  int multiplicity = 1;
  double residual = 0.0;  // |f| at z (scaled functions: relative to edge samples)
  bool polished = false;
};

struct BruteForceOptions {
  int nx = 8, ny = 8;           // initial cells
  double tol = 1e-4;            // cell diameter at which a winding cell stops splitting
  int edge_samples = 8;         // initial samples per edge
  int max_edge_depth = 24;
  int max_cell_depth = 40;
  double polish_tol = 1e-14;
};

struct BruteForceResult {
  std::vector<FoundRoot> roots;
  int total_winding = 0;
  std::size_t evaluations = 0;
};

struct BoundaryZeroError : std::runtime_error {
  cplx where;
  BoundaryZeroError(const std::string& what, cplx w) : std::runtime_error(what), where(w) {}
};

using ScaledFunction = std::function<ScaledComplex(cplx)>;

/// Recursive argument-principle census over a rectangle. Throws
/// BoundaryZeroError when f vanishes on (or too close to) the outer boundary.
BruteForceResult brute_force_roots(const ScaledFunction& f, const Rect& region, const BruteForceOptions& opt = {});
BruteForceResult brute_force_roots_plain(const std::function<cplx(cplx)>& f, const Rect& region,
                                         const BruteForceOptions& opt = {});

/// Zero count of f inside the rectangle by boundary phase tracking.
int winding_number(const ScaledFunction& f, const Rect& cell, int edge_samples = 8, int max_depth = 24);

enum class ResonanceMode { born, full };

struct ResonanceRecord {
  int n = 0;
  Family family = Family::plus;
  cplx lambda;
  cplx z;
  double residual = 0.0;        // |equation| at lambda (born: |1 + A0|, full: |D-| relative)
  double model_residual = 0.0;  // |1 - i C_p e^{-iz} / (-i2k)^{p+1}|
  int multiplicity = 0;
  cplx prediction;
  double abs_error = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string warning;
};

struct ResonanceOptions {
  ResonanceMode mode = ResonanceMode::born;
  double tol = 1e-12;  // Newton step tolerance in z
  int max_iter = 40;
  bool multiplicity = true;  // winding count around each root
  std::optional<GridSpec> grid;  // full mode
  std::optional<int> regime_start;  // overrides AsymptoticConstants::r for predictions
};

/// Resonances lambda_n for n in [n_lo, n_hi] of one family. Requires
/// Condition C (c_star != 0); throws std::invalid_argument otherwise.
std::vector<ResonanceRecord> find_resonances(const Potential& V, int n_lo, int n_hi, Family family,
                                             const ResonanceOptions& opt = {});

/// |1 - i C_p e^{-iz} / (-i2k)^{p+1}| at lambda.
double model_residual(const Potential& V, cplx lambda);

}  // namespace stark
