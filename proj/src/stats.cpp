#include "hslg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "hslg/errors.hpp"

namespace hslg {

double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double t = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 2.0 : -2.0) * t;
    if (t < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

namespace {

double ks_p(double d, double ne) {
  const double sn = std::sqrt(ne);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw DomainError("ks_one_sample: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, ks_p(d, n)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return {d, ks_p(d, na * nb / (na + nb))};
}

Chi2Result chi2_test(const std::vector<double>& observed, const std::vector<double>& expected,
                     int fitted_params, double min_expected) {
  if (observed.size() != expected.size()) throw DomainError("chi2_test: size mismatch");
  std::vector<double> o, e;
  double co = 0, ce = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    co += observed[k];
    ce += expected[k];
    if (ce >= min_expected) {
      o.push_back(co);
      e.push_back(ce);
      co = ce = 0;
    }
  }
  if (ce > 0 || co > 0) {
    if (e.empty()) {
      o.push_back(co);
      e.push_back(ce);
    } else {
      o.back() += co;
      e.back() += ce;
    }
  }
  Chi2Result r;
  for (std::size_t k = 0; k < o.size(); ++k) r.stat += (o[k] - e[k]) * (o[k] - e[k]) / e[k];
  r.dof = static_cast<int>(o.size()) - 1 - fitted_params;
  if (r.dof < 1) throw DomainError("chi2_test: not enough bins");
  r.p = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.stat);
  return r;
}

double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / x.size();
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw DomainError("quantile of empty sample");
  std::sort(x.begin(), x.end());
  const double h = (x.size() - 1) * std::clamp(q, 0.0, 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - lo) * (x[hi] - x[lo]);
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("correlation: bad sizes");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Interval bootstrap_ci(const std::vector<double>& x,
                      const std::function<double(const std::vector<double>&)>& stat,
                      int resamples, double level, RngStream& rng) {
  if (x.empty()) throw DomainError("bootstrap of empty sample");
  Interval r;
  r.point = stat(x);
  std::vector<double> reps;
  reps.reserve(resamples);
  std::vector<double> buf(x.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& v : buf) v = x[rng.next_u64() % x.size()];
    reps.push_back(stat(buf));
  }
  r.lo = quantile(reps, 0.5 * (1 - level));
  r.hi = quantile(reps, 1 - 0.5 * (1 - level));
  return r;
}

}  // namespace hslg
