#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "stark/airy.hpp"
#include "stark/branchcut.hpp"
#include "stark/potential.hpp"
#include "stark/scaled.hpp"

namespace stark {

/// plus: kernel built on w = Bi + iAi (resolvent from the upper half-plane),
/// minus: on Bi - iAi. Both kernels are entire in lambda.
enum class Branch { plus, minus };

enum class Grading { automatic, uniform, geometric, algebraic };

struct GridSpec {
  int panels = 10;
  int order = 16;
  Grading grading = Grading::automatic;
  double sigma = 0.2;  // geometric ratio
  int levels = 10;     // geometric layers toward 0
  double exponent = 0.0;  // algebraic grading exponent; 0 means 1/p
  /// split panels until the determinant moves by less than refine_tol
  bool auto_refine = false;
  double refine_tol = 1e-8;
  int max_doublings = 3;
};

struct NystromGrid {
  std::vector<double> breaks;
  int order = 16;
  /// first panel uses a Gauss-Jacobi rule carrying x^{p-1}
  bool jacobi_first = false;
  double jacobi_beta = 0.0;
  std::vector<double> nodes;
  /// Lebesgue weights (Jacobi panel: weight times x^{1-p})
  std::vector<double> weights;
  /// V-weighted weights, sum omega_j f(x_j) ~ int V f
  std::vector<double> omega;

  std::size_t size() const { return nodes.size(); }
  std::size_t panel_count() const { return breaks.size() - 1; }
  /// Each panel split in two.
  NystromGrid refined(const Potential& V) const;
};

/// Throws std::invalid_argument ("grid.*") when the GridSpec cannot resolve V.
NystromGrid make_grid(const Potential& V, const GridSpec& spec);
/// Grid from explicit breakpoints.
NystromGrid make_grid(const Potential& V, std::vector<double> breaks, int order);

/// Panels scaled with |k| gamma so the kernel's e^{ik|x-y|} stays resolved.
GridSpec default_grid_spec(const Potential& V, cplx lambda);

/// G(x, y) = pi Ai(max - lambda) w(min - lambda).
cplx green_kernel(double x, double y, cplx lambda, Branch branch = Branch::plus);
ScaledComplex green_kernel_scaled(double x, double y, cplx lambda, Branch branch = Branch::plus);

struct DeterminantSample {
  cplx lambda;
  ScaledComplex det;
  cplx det_value;  // det.value(), may overflow in growth sectors
  int matrix_dim = 0;
  double condition_estimate = 1.0;
  bool singular = false;
  /// relative change at the last panel doubling (0 when not refined)
  double refinement_change = 0.0;
  int panels = 0;
  /// value from jost_determinant because the Nystrom entries were too large
  bool ode_continued = false;
};

struct SingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Discretized I + R0(lambda) V acting on the unknown u: (I + A) u = f.
class NystromSystem {
 public:
  NystromSystem(const Potential& V, cplx lambda, const NystromGrid& grid,
                Branch branch = Branch::plus);

  const Eigen::MatrixXcd& kernel() const { return A_; }
  const NystromGrid& grid() const { return grid_; }
  cplx lambda() const { return lambda_; }
  /// Ai(x_j - lambda) at the nodes, scaled pairs.
  const std::vector<AiryPair>& ai_nodes() const { return ai_; }
  /// Symmetrized form S A S^{-1}, S = diag |omega|^{1/2}.
  Eigen::MatrixXcd symmetrized() const;
  DeterminantSample determinant() const;
  /// (I + A)^{-1} f. Throws SingularError at a numerically singular point.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& f) const;

 private:
  void factor() const;

  Potential V_;
  cplx lambda_;
  NystromGrid grid_;
  Branch branch_;
  std::vector<AiryPair> ai_, out_;
  Eigen::MatrixXcd A_;
  mutable bool factored_ = false;
  mutable Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

/// M = |V|^{1/2} R0 V^{1/2} on the grid, M_ij ~ sqrt(w_i)|V_i|^{1/2} G_ij V_j^{1/2} sqrt(w_j).
Eigen::MatrixXcd bs_matrix(const Potential& V, cplx lambda, const NystromGrid& grid,
                           Branch branch = Branch::plus);

/// Nystrom determinant; once max |A_ij| exceeds nystrom_entry_limit the LU
/// product and trace correction lose digits, and jost_determinant is used.
DeterminantSample fredholm_det(const Potential& V, cplx lambda, const NystromGrid& grid,
                               Branch branch = Branch::plus);
inline constexpr double nystrom_entry_limit = 10.0;

/// Determinant on make_grid(V, spec), with panel doubling when spec.auto_refine.
DeterminantSample fredholm_det(const Potential& V, cplx lambda, const GridSpec& spec,
                               Branch branch = Branch::plus);

/// The same determinant as pi W(phi, w)(0), where phi solves
/// phi'' = (x + V - lambda) phi with phi = Ai(x - lambda) for x >= gamma and w
/// is the branch's second solution. phi is integrated leftward by Gauss
/// collocation on the grid panels; Ai dominates in that direction for every
/// lambda, so this stays accurate where the Nystrom entries grow like e^{|z|}.
ScaledComplex jost_determinant(const Potential& V, cplx lambda, const NystromGrid& grid,
                               Branch branch = Branch::plus);

/// Y = M (I + M)^{-1}. Throws SingularError.
Eigen::MatrixXcd y_operator(const Potential& V, cplx lambda, const NystromGrid& grid);

}  // namespace stark
