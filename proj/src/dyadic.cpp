#include "hslg/dyadic.hpp"

#include <cmath>

#include "hslg/errors.hpp"

namespace hslg {

Dyadic Dyadic::from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("dyadic: non-finite value");
  Dyadic d;
  if (x == 0.0) return d;
  int e = 0;
  const double f = std::frexp(x, &e);  // x = f * 2^e, |f| in [0.5,1)
  const double m = std::ldexp(f, 53);  // integral
  d.mant_ = static_cast<long>(m);
  d.exp_ = static_cast<long>(e) - 53;
  return d;
}

Dyadic Dyadic::pow2(long e) {
  Dyadic d;
  d.mant_ = 1;
  d.exp_ = e;
  return d;
}

namespace {

// aligns both to the smaller exponent and applies op
template <class Op>
void align_apply(mpz_class& am, long& ae, const mpz_class& bm, long be, Op op) {
  if (ae == be) {
    op(am, bm);
  } else if (ae > be) {
    mpz_class t;
    mpz_mul_2exp(t.get_mpz_t(), am.get_mpz_t(), static_cast<mp_bitcnt_t>(ae - be));
    am = t;
    ae = be;
    op(am, bm);
  } else {
    mpz_class t;
    mpz_mul_2exp(t.get_mpz_t(), bm.get_mpz_t(), static_cast<mp_bitcnt_t>(be - ae));
    op(am, t);
  }
}

}  // namespace

Dyadic& Dyadic::operator+=(const Dyadic& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  align_apply(mant_, exp_, o.mant_, o.exp_, [](mpz_class& a, const mpz_class& b) { a += b; });
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = -o;
  align_apply(mant_, exp_, o.mant_, o.exp_, [](mpz_class& a, const mpz_class& b) { a -= b; });
  return *this;
}

Dyadic& Dyadic::operator*=(const Dyadic& o) {
  mant_ *= o.mant_;
  exp_ += o.exp_;
  return *this;
}

Dyadic Dyadic::operator-() const {
  Dyadic d = *this;
  d.mant_ = -d.mant_;
  return d;
}

int cmp(const Dyadic& a, const Dyadic& b) {
  const Dyadic d = a - b;
  return d.sign();
}

double Dyadic::log() const {
  if (sign() <= 0) throw DomainError("dyadic log of non-positive value");
  long e = 0;
  const double f = mpz_get_d_2exp(&e, mant_.get_mpz_t());
  return std::log(f) + static_cast<double>(e + exp_) * std::log(2.0);
}

double Dyadic::to_double() const {
  long e = 0;
  const double f = mpz_get_d_2exp(&e, mant_.get_mpz_t());
  return std::ldexp(f, static_cast<int>(e + exp_));
}

mpq_class Dyadic::to_mpq() const {
  mpq_class q(mant_);
  if (exp_ >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(exp_));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-exp_));
  }
  return q;
}

std::string Dyadic::str() const { return mant_.get_str() + "*2^" + std::to_string(exp_); }

}  // namespace hslg
