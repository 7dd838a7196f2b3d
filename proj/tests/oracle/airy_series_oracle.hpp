#pragma once

// Arbitrary-precision Maclaurin evaluation of Ai, Ai', Bi, Bi' on top of MPFR.
// Working precision grows with |z| so the cancellation in the series
// (about e^{(4/3)|z|^{3/2}}) is absorbed.

#include <mpfr.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <complex>

namespace oracle {

class Mp {
 public:
  explicit Mp(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  ~Mp() { mpfr_clear(v_); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

 private:
  mpfr_t v_;
};

struct MpComplex {
  Mp re, im;
  explicit MpComplex(mpfr_prec_t prec) : re(prec), im(prec) {}
  void set(const MpComplex& o) {
    mpfr_set(re.get(), o.re.get(), MPFR_RNDN);
    mpfr_set(im.get(), o.im.get(), MPFR_RNDN);
  }
  void set(std::complex<double> z) {
    mpfr_set_d(re.get(), z.real(), MPFR_RNDN);
    mpfr_set_d(im.get(), z.imag(), MPFR_RNDN);
  }
  std::complex<double> to_complex() const {
    return {mpfr_get_d(re.get(), MPFR_RNDN), mpfr_get_d(im.get(), MPFR_RNDN)};
  }
  long exponent() const {
    long e = LONG_MIN;
    if (!mpfr_zero_p(re.get())) e = mpfr_get_exp(re.get());
    if (!mpfr_zero_p(im.get())) e = std::max<long>(e, mpfr_get_exp(im.get()));
    return e;
  }
};

// a <- a * b, using t1, t2 as scratch.
inline void mul(MpComplex& a, const MpComplex& b, Mp& t1, Mp& t2) {
  mpfr_mul(t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_sub(t1.get(), t1.get(), t2.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_fma(t2.get(), a.im.get(), b.re.get(), t2.get(), MPFR_RNDN);
  mpfr_set(a.re.get(), t1.get(), MPFR_RNDN);
  mpfr_set(a.im.get(), t2.get(), MPFR_RNDN);
}

inline void div_ui(MpComplex& a, unsigned long d) {
  mpfr_div_ui(a.re.get(), a.re.get(), d, MPFR_RNDN);
  mpfr_div_ui(a.im.get(), a.im.get(), d, MPFR_RNDN);
}

inline void add(MpComplex& a, const MpComplex& b) {
  mpfr_add(a.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(a.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

struct AiryReference {
  std::complex<double> ai, aip, bi, bip;
};

inline AiryReference airy_reference(std::complex<double> z) {
  const double r = std::abs(z);
  const double cancel_bits = 4.0 / 3.0 * std::pow(r, 1.5) / std::log(2.0);
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(cancel_bits) + 96;
  // terms must fall below the smallest possible |Ai| times 2^-60
  const long stop_exp = -static_cast<long>(cancel_bits / 2.0) - 70;

  MpComplex zz(prec), z2(prec), z3(prec);
  Mp t1(prec), t2(prec);
  zz.set(z);
  z2.set(zz);
  mul(z2, zz, t1, t2);
  z3.set(z2);
  mul(z3, zz, t1, t2);

  MpComplex tf(prec), tg(prec), f(prec), g(prec), fp(prec), gp(prec), d(prec);
  mpfr_set_ui(tf.re.get(), 1, MPFR_RNDN);
  tg.set(zz);
  mpfr_set_ui(f.re.get(), 1, MPFR_RNDN);
  g.set(zz);
  mpfr_set_ui(gp.re.get(), 1, MPFR_RNDN);

  for (unsigned long k = 1; k < 100000; ++k) {
    const unsigned long k3 = 3 * k;
    d.set(tf);
    mul(d, z2, t1, t2);
    div_ui(d, k3 - 1);
    add(fp, d);
    long e = d.exponent();
    d.set(tg);
    mul(d, z2, t1, t2);
    div_ui(d, k3);
    add(gp, d);
    e = std::max(e, d.exponent());
    mul(tf, z3, t1, t2);
    div_ui(tf, (k3 - 1) * k3);
    mul(tg, z3, t1, t2);
    div_ui(tg, k3 * (k3 + 1));
    add(f, tf);
    add(g, tg);
    e = std::max({e, tf.exponent(), tg.exponent()});
    if (static_cast<double>(k3) > r && e < stop_exp) break;
  }

  // c1 = Ai(0) = 3^{-2/3} / Gamma(2/3), c2 = -Ai'(0) = 3^{-1/3} / Gamma(1/3)
  Mp c1(prec), c2(prec), s3(prec);
  mpfr_set_ui(t1.get(), 2, MPFR_RNDN);
  mpfr_div_ui(t1.get(), t1.get(), 3, MPFR_RNDN);
  mpfr_gamma(t2.get(), t1.get(), MPFR_RNDN);
  mpfr_set_ui(c1.get(), 3, MPFR_RNDN);
  mpfr_neg(t1.get(), t1.get(), MPFR_RNDN);
  mpfr_pow(c1.get(), c1.get(), t1.get(), MPFR_RNDN);
  mpfr_div(c1.get(), c1.get(), t2.get(), MPFR_RNDN);
  mpfr_set_ui(t1.get(), 1, MPFR_RNDN);
  mpfr_div_ui(t1.get(), t1.get(), 3, MPFR_RNDN);
  mpfr_gamma(t2.get(), t1.get(), MPFR_RNDN);
  mpfr_set_ui(c2.get(), 3, MPFR_RNDN);
  mpfr_neg(t1.get(), t1.get(), MPFR_RNDN);
  mpfr_pow(c2.get(), c2.get(), t1.get(), MPFR_RNDN);
  mpfr_div(c2.get(), c2.get(), t2.get(), MPFR_RNDN);
  mpfr_sqrt_ui(s3.get(), 3, MPFR_RNDN);

  auto combine = [&](const MpComplex& a, const MpComplex& b, int sign, bool bi) {
    MpComplex out(prec);
    mpfr_mul(out.re.get(), a.re.get(), c1.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), a.im.get(), c1.get(), MPFR_RNDN);
    mpfr_mul(t1.get(), b.re.get(), c2.get(), MPFR_RNDN);
    mpfr_mul(t2.get(), b.im.get(), c2.get(), MPFR_RNDN);
    if (sign < 0) {
      mpfr_sub(out.re.get(), out.re.get(), t1.get(), MPFR_RNDN);
      mpfr_sub(out.im.get(), out.im.get(), t2.get(), MPFR_RNDN);
    } else {
      mpfr_add(out.re.get(), out.re.get(), t1.get(), MPFR_RNDN);
      mpfr_add(out.im.get(), out.im.get(), t2.get(), MPFR_RNDN);
    }
    if (bi) {
      mpfr_mul(out.re.get(), out.re.get(), s3.get(), MPFR_RNDN);
      mpfr_mul(out.im.get(), out.im.get(), s3.get(), MPFR_RNDN);
    }
    return out.to_complex();
  };

  AiryReference ref;
  ref.ai = combine(f, g, -1, false);
  ref.aip = combine(fp, gp, -1, false);
  ref.bi = combine(f, g, +1, true);
  ref.bip = combine(fp, gp, +1, true);
  return ref;
}

}  // namespace oracle
