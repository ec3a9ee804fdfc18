#include "oracles.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace oracle {

double digamma_series(double z) {
  const long M = 200000;
  long double s = 0.0L;
  for (long n = M - 1; n >= 0; --n) s += 1.0L / (n + 1) - 1.0L / (n + (long double)z);
  // sum_{n>=M} f(n) ~ integral over [M-1/2, inf)
  const long double tail = std::log((M - 0.5L + z) / (M + 0.5L));
  return static_cast<double>(-0.57721566490153286060651209L + s + tail);
}

double polygamma_series(int k, double z) {
  const long M = 200000;
  long double s = 0.0L;
  for (long n = M - 1; n >= 0; --n) s += std::pow((long double)(n + z), -(long double)(k + 1));
  s += std::pow(M - 0.5L + z, -(long double)k) / k;
  long double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return static_cast<double>(((k % 2) ? 1 : -1) * f * s);
}

namespace {
void walk(int i, int j, int m, int k, std::vector<hslg::Site>& cur,
          std::vector<std::vector<hslg::Site>>& out) {
  if (j > i) return;
  cur.push_back({i, j});
  if (i == m && j == k) {
    out.push_back(cur);
  } else {
    if (i < m) walk(i + 1, j, m, k, cur, out);
    if (j < k) walk(i, j + 1, m, k, cur, out);
  }
  cur.pop_back();
}
}  // namespace

std::vector<std::vector<hslg::Site>> confined_paths(int m, int k) {
  std::vector<std::vector<hslg::Site>> out;
  std::vector<hslg::Site> cur;
  walk(1, 1, m, k, cur, out);
  return out;
}

hslg::Dyadic z_bruteforce_exact(const hslg::Environment& env, int m, int k) {
  hslg::Dyadic s;
  for (const auto& p : confined_paths(m, k)) {
    hslg::Dyadic w(1);
    for (const auto& st : p) w *= hslg::Dyadic::from_double(env.w(st.i, st.j));
    s += w;
  }
  return s;
}

double z_bruteforce_log(const hslg::Environment& env, int m, int k) {
  long double s = 0.0L;
  for (const auto& p : confined_paths(m, k)) {
    long double lw = 0.0L;
    for (const auto& st : p) lw += std::log((long double)env.w(st.i, st.j));
    s += std::exp(lw);
  }
  return static_cast<double>(std::log(s));
}

double lgrw_density_closed(double theta, double alpha, double x) {
  const double lc = std::lgamma(2 * theta) - std::lgamma(theta + alpha) - std::lgamma(theta - alpha);
  return std::exp(lc - (theta + alpha) * x - 2 * theta * std::log1p(std::exp(-x)));
}

double path_count(int a, int b, int c, int d) {
  if (c < a || d < b) return 0.0;
  const int r = c - a, u = d - b;
  return std::round(std::exp(std::lgamma(r + u + 1.0) - std::lgamma(r + 1.0) - std::lgamma(u + 1.0)));
}

double log_gamma_cdf(double beta, double x) {
  // P(log G <= x) = P(G <= e^x)
  if (x > 700) return 1.0;
  return boost::math::gamma_p(beta, std::exp(x));
}

}  // namespace oracle
