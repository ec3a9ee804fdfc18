#pragma once

#include <gmpxx.h>

#include <string>

namespace hslg {

// exact binary rational mant * 2^exp; no division, so no gcd work
class Dyadic {
 public:
  Dyadic() = default;
  explicit Dyadic(long v) : mant_(v), exp_(0) {}
  static Dyadic from_double(double x);
  static Dyadic pow2(long e);

  Dyadic& operator+=(const Dyadic& o);
  Dyadic& operator-=(const Dyadic& o);
  Dyadic& operator*=(const Dyadic& o);
  friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
  friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
  friend Dyadic operator*(Dyadic a, const Dyadic& b) { return a *= b; }
  Dyadic operator-() const;

  int sign() const { return sgn(mant_); }
  bool is_zero() const { return sign() == 0; }
  // natural log; requires positive value
  double log() const;
  double to_double() const;
  mpq_class to_mpq() const;
  std::string str() const;

  friend int cmp(const Dyadic& a, const Dyadic& b);
  friend bool operator==(const Dyadic& a, const Dyadic& b) { return cmp(a, b) == 0; }
  friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }

 private:
  mpz_class mant_ = 0;
  long exp_ = 0;
};

}  // namespace hslg
