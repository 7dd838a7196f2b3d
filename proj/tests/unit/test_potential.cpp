#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "stark/fit.hpp"
#include "stark/parallel.hpp"
#include "stark/potential.hpp"
#include "stark/quadrature.hpp"

using namespace stark;

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const GaussRule& g = gauss_legendre(12);
  double s = 0.0, m22 = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    s += g.weights[i];
    m22 += g.weights[i] * std::pow(g.nodes[i], 22);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(m22 == doctest::Approx(2.0 / 23.0).epsilon(1e-14));
}

TEST_CASE("gauss-jacobi endpoint rule") {
  const double beta = -0.25;
  const GaussRule r = jacobi_endpoint_rule(10, beta, 0.5);
  double m0 = 0.0, m3 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    CHECK(r.nodes[i] > 0.0);
    CHECK(r.nodes[i] < 0.5);
    m0 += r.weights[i];
    m3 += r.weights[i] * std::pow(r.nodes[i], 3);
  }
  CHECK(m0 == doctest::Approx(std::pow(0.5, 0.75) / 0.75).epsilon(1e-13));
  CHECK(m3 == doctest::Approx(std::pow(0.5, 3.75) / 3.75).epsilon(1e-13));
}

TEST_CASE("oscillatory breaks stay below the width limit") {
  const auto b = oscillatory_breaks(1.0, 300.0, 1e-3);
  CHECK(b.front() == 0.0);
  CHECK(b.back() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < b.size(); ++i) {
    CHECK(b[i] > b[i - 1]);
    CHECK(b[i] - b[i - 1] <= 6.0 / 300.0 + 1e-15);
  }
}

TEST_CASE("line fit") {
  const LineFit f = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.rms_residual < 1e-12);
  CHECK_THROWS_AS(fit_line({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_line({1.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("parallel_for visits each index once and rethrows") {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 3) throw std::runtime_error("x");
                  }),
                  std::runtime_error);
}

}

TEST_SUITE("potential") {

TEST_CASE("evaluation") {
  CHECK(eval_potential(Potential::constant(1.0), 0.5) == 1.0);
  const Potential P = Potential::power_law(1.0, 0.75);
  CHECK(eval_potential(P, 0.0625) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_potential(P, 1.1) == 0.0);
  CHECK(eval_potential(P, -0.1) == 0.0);
  CHECK(std::isinf(eval_potential(P, 0.0)));
  const Potential R = Potential::reference_smooth();
  CHECK(R(0.5) == doctest::Approx(1.25));
}

TEST_CASE("smooth part representations") {
  const SmoothPart pw = SmoothPart::piecewise({0.0, 0.5, 1.0}, {{1.0, 2.0}, {2.0, -1.0}});
  CHECK(pw(0.25) == doctest::Approx(1.5));
  CHECK(pw(0.75) == doctest::Approx(1.75));
  CHECK(pw.kinks().size() == 1);
  std::vector<double> xs, ys;
  for (int i = 0; i <= 20; ++i) {
    xs.push_back(i / 20.0);
    ys.push_back(std::cos(xs.back()));
  }
  const SmoothPart t = SmoothPart::table(xs, ys, 3);
  CHECK(t(0.333) == doctest::Approx(std::cos(0.333)).epsilon(1e-6));
}

TEST_CASE("validation names the field") {
  Potential V = Potential::power_law(1.0, 0.75);
  V.validate(true);
  V.p = 1.2;
  CHECK_THROWS_WITH_AS(V.validate(true), doctest::Contains("potential.p"), std::invalid_argument);
  V = Potential::power_law(1.0, 0.75);
  V.gamma = -1.0;
  CHECK_THROWS_WITH_AS(V.validate(), doctest::Contains("potential.gamma"), std::invalid_argument);
  V = Potential::power_law(1.0, 0.75);
  V.nu = 0.5;
  CHECK_THROWS_WITH_AS(V.validate(true), doctest::Contains("potential.nu"), std::invalid_argument);
  CHECK_THROWS_AS(Potential::reference_smooth().validate(true), std::invalid_argument);
}

TEST_CASE("l2 norm is finite for p > 1/2") {
  CHECK(l2_norm_sq(Potential::power_law(1.0, 0.75)) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(l1_norm(Potential::power_law(1.0, 0.75)) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("fourier_half closed forms") {
  const Potential one = Potential::constant(1.0);
  CHECK(std::abs(fourier_half(one, 0.0) - 1.0) < 1e-14);
  for (cplx k : {cplx(3.0, 0.0), cplx(-7.0, 2.0), cplx(40.0, 10.0), cplx(0.0, 60.0)}) {
    const cplx ex = (std::exp(2.0 * I * k) - 1.0) / (2.0 * I * k);
    CHECK(std::abs(fourier_half(one, k) - ex) <= 1e-10 * std::abs(ex));
  }
  const Potential P = Potential::power_law(1.0, 0.75);
  const cplx f = fourier_half(P, cplx(0.0, 50.0));
  const double lead = std::tgamma(0.75) / std::pow(100.0, 0.75);
  CHECK(std::abs(f - lead) <= 1.0 / 50.0);
  // the only correction is the tail beyond x = 1, which is e^{-100}-small
  CHECK(std::abs(f - lead) <= 1e-12);
}

TEST_CASE("fourier_half is analytic and bounded by the L1 norm") {
  const Potential P = Potential::power_law(1.0, 0.75);
  const double h = 1e-5;
  for (cplx k : {cplx(2.0, 1.0), cplx(-5.0, 0.5), cplx(12.0, 3.0)}) {
    const cplx fx = (fourier_half(P, k + h) - fourier_half(P, k - h)) / (2.0 * h);
    const cplx fy = (fourier_half(P, k + I * h) - fourier_half(P, k - I * h)) / (2.0 * h);
    CHECK(std::abs(fx + I * fy) <= 1e-6 * std::abs(fx));
    CHECK(std::abs(fourier_half(P, k)) <= l1_norm(P));
  }
}

TEST_CASE("gamma integral") {
  const GammaIntegralCheck a = gamma_integral_check(0.5, 50.0, I);
  CHECK(std::abs(a.rhs - std::sqrt(pi)) < 1e-14);
  CHECK(std::abs(a.lhs - a.rhs) < 1e-10);
  const GammaIntegralCheck b = gamma_integral_check(0.5, 1.0, 100.0 * I);
  CHECK(std::abs(b.rhs - std::sqrt(pi) / 10.0) < 1e-14);
  CHECK(b.residual < 1.0);
  double prev = INFINITY;
  for (double m : {10.0, 100.0, 1000.0}) {
    const GammaIntegralCheck c = gamma_integral_check(0.5, 1.0, cplx(0.0, m));
    CHECK(c.residual <= std::max(prev, 1e-12));
    prev = c.residual;
  }
  double worst = 0.0;
  for (double a : {0.0, 0.7, pi / 2, 2.4, pi}) {
    for (double m : {10.0, 100.0, 1000.0}) worst = std::max(worst, gamma_integral_check(0.75, 1.0, std::polar(m, a)).residual);
  }
  CHECK(worst < 2.0);
}

TEST_CASE("condition C fit") {
  std::vector<cplx> ks;
  for (double m : {10.0, 31.6, 100.0, 316.0, 1000.0}) {
    for (double a : {0.1, pi / 2, pi - 0.1}) ks.push_back(std::polar(m, a));
  }
  const ConditionCFit f = condition_c_fit(Potential::power_law(1.0, 0.75), ks);
  CHECK(std::abs(f.c_p_estimate - 1.2254167024651776) < 1e-3);
  CHECK(f.satisfied);
  const ConditionCFit g = condition_c_fit(Potential::power_law(2.0, 0.6), ks);
  CHECK(std::abs(g.c_p_estimate - 2.0 * std::tgamma(0.6)) < 1e-2);
  CHECK(std::tgamma(0.6) == doctest::Approx(1.4891922488128171).epsilon(1e-15));
  const ConditionCFit s = condition_c_fit(Potential::reference_smooth(), ks);
  CHECK_FALSE(s.satisfied);
  CHECK(s.effective_p == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(condition_c_fit(Potential::power_law(1.0, 0.75), {cplx(10.0, 1.0), cplx(20.0, 1.0)}), FitError);
}

TEST_CASE("gamma function values") {
  CHECK(std::tgamma(0.5) == doctest::Approx(std::sqrt(pi)).epsilon(1e-15));
  CHECK(std::tgamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(condition_c_constant(Potential::power_law(2.0, 0.6)) == doctest::Approx(2.0 * std::tgamma(0.6)));
}

}
