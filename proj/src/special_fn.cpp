#include "hslg/special_fn.hpp"

#include <cmath>
#include <string>

#include "hslg/errors.hpp"

namespace hslg {

namespace {

// B_2j / (2j) for j = 1..7
constexpr double kDigammaAsym[] = {
    1.0 / 12.0,   -1.0 / 120.0, 1.0 / 252.0,      -1.0 / 240.0,
    1.0 / 132.0,  -691.0 / 32760.0, 1.0 / 12.0};

// B_2j for j = 1..8
constexpr double kBernoulli[] = {1.0 / 6.0,   -1.0 / 30.0,  1.0 / 42.0,
                                 -1.0 / 30.0, 5.0 / 66.0,   -691.0 / 2730.0,
                                 7.0 / 6.0,   -3617.0 / 510.0};

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

void ModelParams::validate() const {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("theta must be positive");
  if (!(alpha > -theta) || !std::isfinite(alpha)) throw DomainError("alpha must exceed -theta");
}

double digamma(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("digamma: z must be positive");
  double acc = 0.0;
  while (z < 10.0) {
    acc -= 1.0 / z;
    z += 1.0;
  }
  const double r = 1.0 / (z * z);
  double poly = 0.0;
  for (int j = 6; j >= 0; --j) poly = poly * r + kDigammaAsym[j];
  // poly is in powers of r starting at r^1
  return acc + std::log(z) - 0.5 / z - poly * r;
}

double polygamma(int k, double z) {
  if (k < 1 || k > 4) throw DomainError("polygamma: order must be in 1..4");
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("polygamma: z must be positive");
  const double kf = factorial(k);
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^{k+1}
  double acc = 0.0;
  while (z < 20.0) {
    acc += sign * kf / std::pow(z, k + 1);
    z += 1.0;
  }
  // (k-1)!/z^k + k!/(2 z^{k+1}) + sum_j B_2j (2j+k-1)!/((2j)! z^{2j+k})
  double s = factorial(k - 1) / std::pow(z, k) + kf / (2.0 * std::pow(z, k + 1));
  for (int j = 1; j <= 8; ++j) {
    s += kBernoulli[j - 1] * factorial(2 * j + k - 1) / (factorial(2 * j) * std::pow(z, 2 * j + k));
  }
  return acc + sign * s;
}

double Constants::deltaK(int k) const {
  if (k < 1) throw DomainError("deltaK: k must be >= 1");
  return digamma(theta) - 0.5 * (digamma(theta + alpha) + digamma(theta - alpha)) -
         std::log(2.0) / (2.0 * k);
}

int Constants::k_star() const {
  const double limit = digamma(theta) - 0.5 * (digamma(theta + alpha) + digamma(theta - alpha));
  if (!(limit > 0.0)) throw DomainError("k_star: no k with deltaK > 0 (alpha must be nonzero)");
  int k = 1;
  while (deltaK(k) <= 0.0) {
    ++k;
    if (k > 100000000) throw DomainError("k_star: too large");
  }
  return k;
}

Constants constants(const ModelParams& params) {
  params.validate();
  if (!(params.alpha < params.theta)) throw DomainError("constants need theta - alpha > 0");
  Constants c;
  c.theta = params.theta;
  c.alpha = params.alpha;
  const double dp = digamma(params.theta + params.alpha);
  const double dm = digamma(params.theta - params.alpha);
  const double tp = polygamma(1, params.theta + params.alpha);
  const double tm = polygamma(1, params.theta - params.alpha);
  c.R = -dp - dm;
  c.tau = dm - dp;
  c.sigma2 = tp - tm;
  c.walkVar = tp + tm;
  return c;
}

}  // namespace hslg
