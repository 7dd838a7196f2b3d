#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "../oracle/airy_series_oracle.hpp"
#include "stark/airy.hpp"

using namespace stark;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

cplx log_of(const AiryPair& p) { return std::log(p.f) + p.exponent; }

}  // namespace

TEST_SUITE("airy") {

TEST_CASE("values at the origin") {
  const AiryValue v = airy_eval(0.0);
  CHECK(std::abs(v.ai_value() - 0.3550280538878172) < 1e-16);
  CHECK(std::abs(v.aip_value() + 0.2588194037928068) < 1e-16);
  CHECK(std::abs(v.bi_value() - 0.6149266274460007) < 1e-15);
  CHECK(std::abs(v.bip_value() - 0.4482883573538264) < 1e-15);
}

TEST_CASE("wronskian at 3+2i") {
  const AiryValue v = airy_eval(cplx(3.0, 2.0));
  const cplx w = v.scaled_wronskian() * std::exp(v.ai_exponent + v.bi_exponent);
  CHECK(std::abs(w - 1.0 / pi) < 1e-13);
}

TEST_CASE("against the multiprecision series") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const cplx z = std::polar(30.0 * std::sqrt(u(rng)), 2.0 * pi * u(rng));
    const AiryValue v = airy_eval(z);
    const oracle::AiryReference o = oracle::airy_reference(z);
    worst = std::max({worst, rel(v.ai_value(), o.ai), rel(v.aip_value(), o.aip),
                      rel(v.bi_value(), o.bi), rel(v.bip_value(), o.bip)});
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("region boundaries agree with the oracle") {
  for (double r : {airy_detail::maclaurin_radius, airy_detail::asymptotic_radius}) {
    for (double a : {0.1, 1.0, 2.0, 3.0, -2.5, 2.0 * pi / 3.0}) {
      for (double dr : {-1e-9, 1e-9}) {
        const cplx z = std::polar(r + dr, a);
        const oracle::AiryReference o = oracle::airy_reference(z);
        CHECK(rel(airy_ai(z).value().value(), o.ai) < 1e-12);
        CHECK(rel(airy_bi(z).value().value(), o.bi) < 1e-12);
      }
    }
  }
}

TEST_CASE("differential equation residual") {
  const double h = 1e-3;
  for (cplx z : {cplx(1.0, 1.0), cplx(-6.0, 0.5), cplx(5.0, -4.0)}) {
    const cplx a0 = airy_ai(z).value().value();
    const cplx ap = airy_ai(z + h).value().value();
    const cplx am = airy_ai(z - h).value().value();
    const cplx d2 = (ap - 2.0 * a0 + am) / (h * h);
    CHECK(std::abs(d2 - z * a0) < 1e-5 * std::abs(z * a0));
  }
}

TEST_CASE("connection identity for Bi") {
  const cplx w = std::polar(1.0, 2.0 * pi / 3.0);
  for (double x = -20.0; x <= 20.0; x += 2.5) {
    for (double y = -20.0; y <= 20.0; y += 2.5) {
      const cplx z(x, y);
      if (std::abs(z) > 20.0) continue;
      const cplx lhs = airy_bi(z).value().value();
      const cplx rhs = std::polar(1.0, pi / 6) * airy_ai(z * w).value().value() +
                       std::polar(1.0, -pi / 6) * airy_ai(z * std::conj(w)).value().value();
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("outgoing solution") {
  const AiryPair w0 = airy_outgoing(0.0);
  CHECK(std::abs(w0.value().value() - cplx(0.6149266274460007, 0.3550280538878172)) < 1e-15);
  const AiryPair w = airy_outgoing(-25.0);
  CHECK(std::abs(w.value().value()) * std::pow(25.0, 0.25) == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(0.02));
  double prev = INFINITY;
  // t = x - lambda: decay as Im lambda grows
  for (double y = 0.5; y < 30.0; y += 0.5) {
    const double m = airy_outgoing(cplx(-3.0, -y)).value().log_abs();
    CHECK(m < prev);
    prev = m;
  }
  const cplx t(2.0, -1.5);
  const cplx inc = airy_incoming(t).value().value();
  CHECK(std::abs(inc - (airy_bi(t).value().value() - I * airy_ai(t).value().value())) < 1e-13 * std::abs(inc));
}

TEST_CASE("decay form of Ai") {
  for (double a : {0.0, 1.0, -2.0, 2.9}) {
    for (double r : {20.0, 50.0, 200.0}) {
      const cplx z = std::polar(r, a);
      const cplx l = log_of(airy_ai(z)) + 2.0 / 3.0 * std::pow(z, 1.5) + std::log(2.0 * std::pow(z, 0.25) * std::sqrt(pi));
      CHECK(std::abs(std::exp(l) - 1.0) <= 10.0 / std::pow(r, 1.5));
    }
  }
}

TEST_CASE("asymptotic square of Ai") {
  const double x = 0.3;
  const SpectralPoint lp = SpectralPoint::polar(40.0, pi / 2);
  const AsymptoticSquare in = airy_asymptotic_square(x, lp, AiryRegime::interior);
  CHECK_FALSE(in.regime_mismatch);
  const AiryPair a = airy_ai(x - lp.lambda());
  const ScaledComplex sq{a.f * a.f, 2.0 * a.exponent};
  const double err = std::abs((sq / in.value).value() - 1.0);
  CHECK(err <= 5.0 / std::abs(lp.k()));

  const AsymptoticSquare at0 = airy_asymptotic_square(0.0, lp, AiryRegime::interior);
  const cplx k = lp.k();
  const ScaledComplex expect = ScaledComplex{I / (4.0 * k * pi)} * ScaledComplex::from_log(-I * 4.0 / 3.0 * k * k * k);
  CHECK(std::abs((at0.value / expect).value() - 1.0) < 1e-12);

  const SpectralPoint lr = SpectralPoint::polar(40.0, 0.0);
  const AsymptoticSquare nr = airy_asymptotic_square(x, lr, AiryRegime::near_real);
  const cplx ar = airy_ai(x - 40.0).value().value();
  CHECK(std::abs(ar * ar - nr.value.value()) <= 1.0 / 40.0);

  CHECK(airy_asymptotic_square(x, lr, AiryRegime::interior).regime_mismatch);
  CHECK(airy_asymptotic_square(x, lp, AiryRegime::near_real).regime_mismatch);
}

TEST_CASE("three-halves expansion near the support") {
  for (double phi : {0.5, 1.5, 2.5}) {
    double worst = 0.0;
    for (double r : {100.0, 400.0, 1600.0}) {
      const cplx ml = -std::polar(r, phi);
      for (double x = 0.0; x <= 1.0; x += 0.25) {
        const cplx d = std::pow(x + ml, 1.5) - (std::pow(ml, 1.5) + 1.5 * x * std::pow(ml, 0.5));
        worst = std::max(worst, std::abs(d) * std::sqrt(r));
      }
    }
    CHECK(worst < 1.0);
  }
}

TEST_CASE("non-finite input") {
  CHECK_THROWS_AS(airy_eval(cplx(NAN, 0.0)), std::domain_error);
  CHECK_THROWS_AS(airy_ai(cplx(INFINITY, 1.0)), std::domain_error);
}

}
