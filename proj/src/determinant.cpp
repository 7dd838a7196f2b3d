#include "stark/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "stark/parallel.hpp"
#include "stark/quadrature.hpp"

namespace stark {

namespace {

AiryPair second_solution(cplx t, Branch b) {
  return b == Branch::plus ? airy_outgoing(t) : airy_incoming(t);
}

void add_panel(NystromGrid& g, const Potential& V, double a, double b, bool jacobi) {
  const int n = g.order;
  if (jacobi) {
    GaussRule r = jacobi_endpoint_rule(n, V.p - 1.0, b);
    for (int q = 0; q < n; ++q) {
      const double x = r.nodes[q];
      const double lift = std::pow(x, 1.0 - V.p);
      g.nodes.push_back(x);
      g.weights.push_back(r.weights[q] * lift);
      g.omega.push_back(r.weights[q] * (V.c_star + lift * V.smooth(x)));
    }
    return;
  }
  GaussRule r = legendre_on(n, a, b);
  for (int q = 0; q < n; ++q) {
    g.nodes.push_back(r.nodes[q]);
    g.weights.push_back(r.weights[q]);
    g.omega.push_back(r.weights[q] * V(r.nodes[q]));
  }
}

// Barycentric Lagrange basis of the panel nodes evaluated at y.
void lagrange_row(const double* xs, const double* bw, int n, double y, double* out) {
  for (int j = 0; j < n; ++j) {
    if (y == xs[j]) {
      std::fill(out, out + n, 0.0);
      out[j] = 1.0;
      return;
    }
  }
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    out[j] = bw[j] / (y - xs[j]);
    s += out[j];
  }
  for (int j = 0; j < n; ++j) out[j] /= s;
}

}  // namespace

NystromGrid make_grid(const Potential& V, std::vector<double> breaks, int order) {
  if (order < 2) throw std::invalid_argument("grid.order: must be >= 2");
  if (breaks.size() < 2 || breaks.front() != 0.0)
    throw std::invalid_argument("grid.breaks: must start at 0 and contain a panel");
  if (!std::is_sorted(breaks.begin(), breaks.end()))
    throw std::invalid_argument("grid.breaks: not increasing");
  NystromGrid g;
  g.breaks = std::move(breaks);
  g.order = order;
  g.jacobi_first = V.singular();
  g.jacobi_beta = V.p - 1.0;
  for (std::size_t i = 0; i + 1 < g.breaks.size(); ++i)
    add_panel(g, V, g.breaks[i], g.breaks[i + 1], i == 0 && g.jacobi_first);
  return g;
}

NystromGrid make_grid(const Potential& V, const GridSpec& spec) {
  if (spec.panels < 1) throw std::invalid_argument("grid.panels: must be >= 1");
  const double gm = V.gamma;
  Grading gr = spec.grading;
  if (gr == Grading::automatic) gr = V.singular() ? Grading::geometric : Grading::uniform;
  std::vector<double> br{0.0};
  switch (gr) {
    case Grading::uniform:
    case Grading::automatic:
      for (int i = 1; i <= spec.panels; ++i) br.push_back(gm * i / spec.panels);
      break;
    case Grading::geometric: {
      if (!(spec.sigma > 0.0 && spec.sigma < 1.0)) throw std::invalid_argument("grid.sigma: must lie in (0, 1)");
      if (spec.levels < 0) throw std::invalid_argument("grid.levels: must be >= 0");
      for (int l = spec.levels; l >= 1; --l) br.push_back(gm * std::pow(spec.sigma, l));
      const double start = spec.levels > 0 ? br.back() : 0.0;
      for (int i = 1; i <= spec.panels; ++i) br.push_back(start + (gm - start) * i / spec.panels);
      break;
    }
    case Grading::algebraic: {
      const double q = spec.exponent > 0.0 ? spec.exponent : 1.0 / V.p;
      for (int i = 1; i <= spec.panels; ++i) br.push_back(gm * std::pow(double(i) / spec.panels, q));
      break;
    }
  }
  br.back() = gm;
  for (double k : V.smooth.kinks())
    if (k > 0.0 && k < gm) br.push_back(k);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end(), [gm](double a, double b) { return b - a < 1e-14 * gm; }),
           br.end());
  return make_grid(V, br, spec.order);
}

NystromGrid NystromGrid::refined(const Potential& V) const {
  std::vector<double> br{breaks.front()};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    // keep the innermost graded panels geometric
    const double a = breaks[i], b = breaks[i + 1];
    br.push_back(jacobi_first && i == 0 ? 0.5 * b : 0.5 * (a + b));
    br.push_back(b);
  }
  return make_grid(V, br, order);
}

GridSpec default_grid_spec(const Potential& V, cplx lambda) {
  GridSpec s;
  const double k = std::sqrt(std::abs(lambda));
  s.panels = std::max(10, static_cast<int>(std::ceil(1.5 * k * V.gamma)));
  return s;
}

ScaledComplex green_kernel_scaled(double x, double y, cplx lambda, Branch branch) {
  const double hi = std::max(x, y), lo = std::min(x, y);
  const AiryPair a = airy_ai(hi - lambda);
  const AiryPair w = second_solution(lo - lambda, branch);
  return ScaledComplex{pi * a.f * w.f, a.exponent + w.exponent}.normalized();
}

cplx green_kernel(double x, double y, cplx lambda, Branch branch) {
  return green_kernel_scaled(x, y, lambda, branch).value();
}

NystromSystem::NystromSystem(const Potential& V, cplx lambda, const NystromGrid& grid, Branch branch)
    : V_(V), lambda_(lambda), grid_(grid), branch_(branch) {
  const int n = static_cast<int>(grid.size());
  ai_.resize(n);
  out_.resize(n);
  A_ = Eigen::MatrixXcd::Zero(n, n);
  if (n == 0) return;
  for (int j = 0; j < n; ++j) {
    ai_[j] = airy_ai(grid.nodes[j] - lambda);
    out_[j] = second_solution(grid.nodes[j] - lambda, branch);
  }
  if (V.is_zero()) return;

  const int order = grid.order;
  const int panels = static_cast<int>(grid.panel_count());
  // barycentric weights per panel
  std::vector<double> bw(n);
  for (int p = 0; p < panels; ++p) {
    const double* xs = grid.nodes.data() + p * order;
    for (int j = 0; j < order; ++j) {
      double d = 1.0;
      for (int k = 0; k < order; ++k)
        if (k != j) d *= xs[j] - xs[k];
      bw[p * order + j] = 1.0 / d;
    }
  }

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const int i = static_cast<int>(row);
    const int pi_ = i / order;
    const double xi = grid.nodes[i];
    for (int j = 0; j < n; ++j) {
      if (j / order == pi_) continue;
      cplx g;
      if (grid.nodes[j] > xi)
        g = ai_[j].f * out_[i].f * std::exp(ai_[j].exponent + out_[i].exponent);
      else
        g = ai_[i].f * out_[j].f * std::exp(ai_[i].exponent + out_[j].exponent);
      A_(i, j) = pi * g * grid.omega[j];
    }

    // own panel: split at x_i, interpolate u through the panel nodes
    const double a = grid.breaks[pi_], b = grid.breaks[pi_ + 1];
    const double* xs = grid.nodes.data() + pi_ * order;
    const double* bwp = bw.data() + pi_ * order;
    const cplx c = xi - lambda;
    const double scale = std::exp(ai_[i].exponent + out_[i].exponent);
    std::vector<double> L(order);
    auto accumulate = [&](const GaussRule& r, bool jac) {
      for (std::size_t m = 0; m < r.nodes.size(); ++m) {
        const double y = r.nodes[m];
        double om;
        if (jac)
          om = r.weights[m] * (V.c_star + std::pow(y, 1.0 - V.p) * V.smooth(y));
        else
          om = r.weights[m] * V(y);
        if (om == 0.0) continue;
        const cplx h = y - xi;
        cplx g;
        if (y < xi) {
          cplx wy = out_[i].f, wyp = out_[i].fp;
          airy_taylor_shift(c, h, wy, wyp);
          g = ai_[i].f * wy;
        } else {
          cplx ay = ai_[i].f, ayp = ai_[i].fp;
          airy_taylor_shift(c, h, ay, ayp);
          g = ay * out_[i].f;
        }
        const cplx wgt = pi * g * scale * om;
        lagrange_row(xs, bwp, order, y, L.data());
        for (int j = 0; j < order; ++j) A_(i, pi_ * order + j) += wgt * L[j];
      }
    };
    const bool jac = grid.jacobi_first && pi_ == 0;
    if (xi > a) accumulate(jac ? jacobi_endpoint_rule(order, grid.jacobi_beta, xi) : legendre_on(order, a, xi), jac);
    if (b > xi) accumulate(legendre_on(order, xi, b), false);
  });
}

Eigen::MatrixXcd NystromSystem::symmetrized() const {
  const int n = static_cast<int>(A_.rows());
  Eigen::MatrixXcd M(n, n);
  for (int j = 0; j < n; ++j) {
    const double sj = std::sqrt(std::abs(grid_.omega[j]));
    for (int i = 0; i < n; ++i) {
      const double si = std::sqrt(std::abs(grid_.omega[i]));
      M(i, j) = sj == 0.0 ? cplx{} : si * A_(i, j) / sj;
    }
  }
  return M;
}

void NystromSystem::factor() const {
  if (factored_) return;
  const int n = static_cast<int>(A_.rows());
  lu_.compute(Eigen::MatrixXcd::Identity(n, n) + A_);
  factored_ = true;
}

DeterminantSample NystromSystem::determinant() const {
  DeterminantSample d;
  d.lambda = lambda_;
  d.matrix_dim = static_cast<int>(A_.rows());
  d.panels = static_cast<int>(grid_.panel_count());
  if (A_.rows() == 0 || A_.isZero(0.0)) {
    d.det = ScaledComplex{1.0};
    d.det_value = 1.0;
    return d;
  }
  factor();
  const auto& U = lu_.matrixLU();
  double logmag = 0.0;
  cplx phase = static_cast<double>(lu_.permutationP().determinant());
  for (int k = 0; k < U.rows(); ++k) {
    const cplx u = U(k, k);
    const double m = std::abs(u);
    if (m == 0.0) {
      d.singular = true;
      d.det = ScaledComplex{};
      d.det_value = 0.0;
      d.condition_estimate = INFINITY;
      return d;
    }
    logmag += std::log(m);
    phase *= u / m;
  }
  // The kernel's eigenvalues decay like m^{-2}, so det(I + A) truncates a tail
  // worth O(1/n). Replace the discrete trace by the accurately integrated one:
  // that leaves only the det_2 tail, O(n^{-3}).
  cplx tr_exact = 0.0, tr_disc = 0.0;
  for (int j = 0; j < U.rows(); ++j) {
    const cplx g = pi * ai_[j].f * out_[j].f * std::exp(ai_[j].exponent + out_[j].exponent);
    tr_exact += g * grid_.omega[j];
    tr_disc += A_(j, j);
  }
  const cplx corr = tr_exact - tr_disc;
  logmag += corr.real();
  phase *= std::polar(1.0, corr.imag());
  d.det = ScaledComplex{phase, logmag}.normalized();
  d.det_value = d.det.value();
  const double rc = lu_.rcond();
  d.condition_estimate = rc > 0.0 ? std::max(1.0, 1.0 / rc) : INFINITY;
  d.singular = !(rc > 1e-15);
  return d;
}

Eigen::VectorXcd NystromSystem::solve(const Eigen::VectorXcd& f) const {
  if (A_.rows() == 0) return f;
  factor();
  if (!(lu_.rcond() > 1e-15)) throw SingularError("Nystrom system is numerically singular");
  return lu_.solve(f);
}

Eigen::MatrixXcd bs_matrix(const Potential& V, cplx lambda, const NystromGrid& grid, Branch branch) {
  return NystromSystem(V, lambda, grid, branch).symmetrized();
}

DeterminantSample fredholm_det(const Potential& V, cplx lambda, const NystromGrid& grid, Branch branch) {
  const NystromSystem sys(V, lambda, grid, branch);
  if (sys.kernel().size() == 0 || !(sys.kernel().cwiseAbs().maxCoeff() > nystrom_entry_limit))
    return sys.determinant();
  DeterminantSample d;
  d.lambda = lambda;
  d.matrix_dim = static_cast<int>(sys.kernel().rows());
  d.panels = static_cast<int>(grid.panel_count());
  d.ode_continued = true;
  d.det = jost_determinant(V, lambda, grid, branch);
  d.det_value = d.det.value();
  d.condition_estimate = NAN;
  d.singular = d.det.mantissa == cplx(0.0);
  return d;
}

DeterminantSample fredholm_det(const Potential& V, cplx lambda, const GridSpec& spec, Branch branch) {
  NystromGrid g = make_grid(V, spec);
  DeterminantSample d = fredholm_det(V, lambda, g, branch);
  if (!spec.auto_refine) return d;
  for (int it = 0; it < spec.max_doublings; ++it) {
    g = g.refined(V);
    DeterminantSample d2 = fredholm_det(V, lambda, g, branch);
    const double change = std::abs((d2.det - d.det).value()) / std::max(1.0, std::abs(d2.det_value));
    d2.refinement_change = change;
    d = d2;
    if (change <= spec.refine_tol) break;
  }
  return d;
}

namespace {

struct Collocation {
  std::vector<double> c, b;
  Eigen::MatrixXd a;
};

// Gauss-Legendre collocation tableau with s stages (order 2s at step ends)
const Collocation& collocation(int s) {
  thread_local std::vector<std::pair<int, Collocation>> cache;
  for (const auto& [n, t] : cache)
    if (n == s) return t;
  const GaussRule& g = gauss_legendre(s);
  Collocation t;
  for (int i = 0; i < s; ++i) {
    t.c.push_back(0.5 * (1.0 + g.nodes[i]));
    t.b.push_back(0.5 * g.weights[i]);
  }
  t.a = Eigen::MatrixXd::Zero(s, s);
  for (int i = 0; i < s; ++i) {
    // int_0^{c_i} l_j, exact with an s-point rule on [0, c_i]
    const GaussRule q = legendre_on(s, 0.0, t.c[i]);
    for (std::size_t m = 0; m < q.nodes.size(); ++m) {
      for (int j = 0; j < s; ++j) {
        double l = 1.0;
        for (int k = 0; k < s; ++k)
          if (k != j) l *= (q.nodes[m] - t.c[k]) / (t.c[j] - t.c[k]);
        t.a(i, j) += q.weights[m] * l;
      }
    }
  }
  cache.emplace_back(s, std::move(t));
  return cache.back().second;
}

// One collocation step of y' = [[0, r], [r q, 0]] y over a parameter interval
// of length h, where coef(c) returns (r, r q) at the fraction c of the step.
template <class Coef>
void collocation_step(const Collocation& t, double h, const Coef& coef, cplx& y0, cplx& y1) {
  const int s = static_cast<int>(t.c.size());
  std::vector<cplx> r(s), rq(s);
  for (int i = 0; i < s; ++i) std::tie(r[i], rq[i]) = coef(t.c[i]);
  // unknowns K_i = B(c_i) Y_i, stacked (K_i^0, K_i^1)
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(2 * s, 2 * s);
  Eigen::VectorXcd rhs(2 * s);
  for (int i = 0; i < s; ++i) {
    rhs(2 * i) = r[i] * y1;
    rhs(2 * i + 1) = rq[i] * y0;
    for (int j = 0; j < s; ++j) {
      M(2 * i, 2 * j + 1) -= h * t.a(i, j) * r[i];
      M(2 * i + 1, 2 * j) -= h * t.a(i, j) * rq[i];
    }
  }
  const Eigen::VectorXcd K = M.partialPivLu().solve(rhs);
  for (int j = 0; j < s; ++j) {
    y0 += h * t.b[j] * K(2 * j);
    y1 += h * t.b[j] * K(2 * j + 1);
  }
}

}  // namespace

ScaledComplex jost_determinant(const Potential& V, cplx lambda, const NystromGrid& grid, Branch branch) {
  if (V.is_zero()) return ScaledComplex{1.0};
  const Collocation& tab = collocation(std::max(grid.order, 4));
  const AiryPair a = airy_ai(V.gamma - lambda);
  cplx y0 = a.f, y1 = a.fp;
  double e = a.exponent;
  auto renormalize = [&] {
    const double m = std::max(std::abs(y0), std::abs(y1));
    if (m > 0.0 && std::isfinite(m)) {
      y0 /= m;
      y1 /= m;
      e += std::log(m);
    }
  };
  for (std::size_t p = grid.panel_count(); p-- > 0;) {
    const double lo = grid.breaks[p], hi = grid.breaks[p + 1];
    if (p == 0 && V.singular()) {
      // x = hi u^m with m p = 4 smooths x^{p-1} dx; integrate u from 1 to 0
      const double m = 4.0 / V.p;
      collocation_step(tab, -1.0,
                       [&](double c) {
                         const double u = 1.0 - c;
                         const double x = hi * std::pow(u, m);
                         const double dx = hi * m * std::pow(u, m - 1.0);
                         return std::pair<cplx, cplx>{dx, dx * (x - lambda + V(x))};
                       },
                       y0, y1);
    } else {
      collocation_step(tab, lo - hi,
                       [&](double c) {
                         const double x = hi + c * (lo - hi);
                         return std::pair<cplx, cplx>{1.0, x - lambda + V(x)};
                       },
                       y0, y1);
    }
    renormalize();
  }
  const AiryPair w = second_solution(-lambda, branch);
  return ScaledComplex{pi * (y0 * w.fp - y1 * w.f), e + w.exponent}.normalized();
}

Eigen::MatrixXcd y_operator(const Potential& V, cplx lambda, const NystromGrid& grid) {
  NystromSystem sys(V, lambda, grid);
  Eigen::MatrixXcd M = sys.symmetrized();
  const int n = static_cast<int>(M.rows());
  if (n == 0) return M;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Eigen::MatrixXcd::Identity(n, n) + M);
  if (!(lu.rcond() > 1e-15)) throw SingularError("y_operator: I + Y0 is numerically singular");
  return Eigen::MatrixXcd::Identity(n, n) - lu.inverse();
}

}  // namespace stark
