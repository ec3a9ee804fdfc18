#include "hslg/lgrw.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hslg/errors.hpp"

namespace hslg {

namespace {

void require_bound(const ModelParams& p) {
  p.validate();
  if (!p.bound_phase()) throw DomainError("bound phase requires alpha < 0");
}

}  // namespace

double sample_increment(const ModelParams& p, RngStream& rng) {
  const double l2 = sample_log_gamma(p.theta - p.alpha, rng);
  const double l1 = sample_log_gamma(p.theta + p.alpha, rng);
  return l2 - l1;
}

WalkSample sample_walk(const ModelParams& p, int n, RngStream& rng) {
  require_bound(p);
  if (n < 0) throw DomainError("walk length must be nonnegative");
  WalkSample w{p, {0.0}};
  extend_walk(w, n, rng);
  return w;
}

void extend_walk(WalkSample& w, int more, RngStream& rng) {
  w.S.reserve(w.S.size() + more);
  for (int k = 0; k < more; ++k) w.S.push_back(w.S.back() + sample_increment(w.params, rng));
}

double increment_density(const ModelParams& p, double x) {
  require_bound(p);
  const double a = p.theta - p.alpha, b = p.theta + p.alpha;
  // exponent (a+b) y - e^y (1 + e^{-x}) - b x, peaked at y*
  const double c = std::log1p(std::exp(-x));  // log(1+e^{-x})
  const double cs = std::isfinite(c) ? c : -x;
  const double ystar = std::log(a + b) - cs;
  auto f = [&](double y) { return (a + b) * y - std::exp(y + cs) - b * x; };
  const double fmax = f(ystar);
  auto g = [&](double y) { return std::exp(f(y) - fmax); };
  const double lo = ystar - 45.0 / (a + b) - 5.0, hi = ystar + 5.0;
  double err = 0.0;
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, lo, hi, 15, 1e-12, &err);
  if (!(err <= 1e-9 * std::max(I, 1e-300) + 1e-300) || !std::isfinite(I)) {
    throw NumericError("increment_density: quadrature did not converge at x=" + std::to_string(x) +
                       " (error estimate " + std::to_string(err) + ")");
  }
  return std::exp(fmax - std::lgamma(a) - std::lgamma(b)) * I;
}

IncrementCdf::IncrementCdf(const ModelParams& p, double step) {
  require_bound(p);
  const double a = p.theta - p.alpha, b = p.theta + p.alpha;
  // left tail ~ e^{a x}, right tail ~ e^{-b x}
  lo_ = -45.0 / a - 5.0;
  hi_ = 45.0 / b + 5.0;
  const int n = static_cast<int>(std::ceil((hi_ - lo_) / step));
  h_ = (hi_ - lo_) / n;
  std::vector<double> d(n + 1), mid(n);
  for (int k = 0; k <= n; ++k) d[k] = increment_density(p, lo_ + k * h_);
  for (int k = 0; k < n; ++k) mid[k] = increment_density(p, lo_ + (k + 0.5) * h_);
  F_.assign(n + 1, 0.0);
  for (int k = 0; k < n; ++k) F_[k + 1] = F_[k] + h_ / 6.0 * (d[k] + 4 * mid[k] + d[k + 1]);
  mass_ = F_[n];
}

double IncrementCdf::operator()(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return mass_;
  const double t = (x - lo_) / h_;
  const std::size_t k = std::min(static_cast<std::size_t>(t), F_.size() - 2);
  const double fr = t - k;
  return F_[k] + fr * (F_[k + 1] - F_[k]);
}

QSeries q_partial(WalkSample& w, const QOptions& opt, RngStream& rng) {
  const Constants c = constants(w.params);
  if (!(c.tau > 0)) throw DomainError("Q series needs positive drift");
  const double geo = 1.0 / std::expm1(c.tau / 2);
  QSeries q;
  q.partial.push_back(1.0);
  int M = 0;
  while (true) {
    const double bound = std::exp(-w.S[M]) * geo;
    if (bound <= opt.epsilon) {
      if (w.steps() < M + opt.window) extend_walk(w, M + opt.window - w.steps(), rng);
      bool drift = true;
      for (int j = 1; j <= opt.window && drift; ++j) drift = w.S[M + j] >= w.S[M] + 0.5 * c.tau * j;
      if (drift) {
        // the window terms are known, fold them in
        for (int j = 1; j <= opt.window; ++j) q.partial.push_back(q.partial.back() + std::exp(-w.S[M + j]));
        M += opt.window;
        q.tail_bound = std::exp(-w.S[M]) * geo;
        q.window = opt.window;
        // dyadic blocks past the window, Kolmogorov on each
        q.kolmogorov_risk = std::min(1.0, 16.0 * c.walkVar / (c.tau * c.tau * opt.window));
        q.converged = true;
        break;
      }
    }
    if (M >= opt.cap) {
      q.tail_bound = bound;
      q.converged = false;
      break;
    }
    ++M;
    if (w.steps() < M) extend_walk(w, std::max(64, M - w.steps()), rng);
    q.partial.push_back(q.partial.back() + std::exp(-w.S[M]));
  }
  q.M = M;
  q.value = q.partial.back();
  return q;
}

LimitPmf limiting_endpoint_pmf(const WalkSample& w, const QSeries& q, int kmax) {
  if (kmax < 0 || kmax > q.M || q.M > w.steps()) throw DomainError("kmax beyond the summed part of Q");
  LimitPmf r;
  r.converged = q.converged;
  double s = 0;
  for (int k = 0; k <= kmax; ++k) {
    r.probs.push_back(std::exp(-w.S[k]) / q.value);
    s += r.probs.back();
  }
  r.deficit = 1.0 - s;
  return r;
}

double kolmogorov_bound(const ModelParams& p, double M, double N, double lambda) {
  const Constants c = constants(p);
  return M * std::sqrt(N) * c.walkVar / (lambda * lambda);
}

MaximalReport maximal_inequality_check(const ModelParams& p, double M, int N, double lambda,
                                       int samples, RngStream& rng) {
  require_bound(p);
  if (!(M > 0) || N <= 0 || !(lambda > 0) || samples <= 0) throw DomainError("arguments must be positive");
  MaximalReport r;
  r.steps = static_cast<int>(std::floor(M * std::sqrt(static_cast<double>(N))));
  r.bound = kolmogorov_bound(p, M, N, lambda);
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    double S = 0.0;
    for (int k = 1; k <= r.steps; ++k) {
      S += sample_increment(p, rng);
      if (S <= -lambda) {
        ++hits;
        break;
      }
    }
  }
  r.empirical = static_cast<double>(hits) / samples;
  r.mc_error = std::sqrt(std::max(r.empirical * (1 - r.empirical), 1.0 / samples) / samples);
  r.ok = r.empirical <= r.bound + 3 * r.mc_error;
  return r;
}

DoubleLimitTable double_limit_check(const ModelParams& p, const std::vector<int>& k_grid,
                                    const std::vector<int>& n_grid, int samples, RngStream& rng) {
  require_bound(p);
  if (!std::is_sorted(k_grid.begin(), k_grid.end()) || !std::is_sorted(n_grid.begin(), n_grid.end())) {
    throw DomainError("grids must be increasing");
  }
  DoubleLimitTable t;
  t.k_grid = k_grid;
  t.n_grid = n_grid;
  t.mean_ratio.assign(n_grid.size(), std::vector<double>(k_grid.size(), 0.0));
  t.frac_small = t.mean_ratio;
  const int nmax = n_grid.empty() ? 0 : n_grid.back();
  for (int s = 0; s < samples; ++s) {
    const WalkSample w = sample_walk(p, nmax, rng);
    // suffix sums of e^{-S_r}, shifted by min S for range
    const double m = *std::min_element(w.S.begin(), w.S.end());
    std::vector<double> e(nmax + 1);
    for (int r = 0; r <= nmax; ++r) e[r] = std::exp(-(w.S[r] - m));
    std::vector<double> pre(nmax + 2, 0.0);
    for (int r = 0; r <= nmax; ++r) pre[r + 1] = pre[r] + e[r];
    for (std::size_t a = 0; a < n_grid.size(); ++a) {
      const int n = n_grid[a];
      double prev = 2.0;
      for (std::size_t b = 0; b < k_grid.size(); ++b) {
        const int k = k_grid[b];
        const double ratio = k > n ? 0.0 : (pre[n + 1] - pre[k]) / pre[n + 1];
        if (ratio > prev) t.monotone = false;
        prev = ratio;
        t.mean_ratio[a][b] += ratio;
        t.frac_small[a][b] += ratio < 0.05 ? 1.0 : 0.0;
      }
    }
  }
  for (auto* tab : {&t.mean_ratio, &t.frac_small})
    for (auto& row : *tab)
      for (auto& v : row) v /= samples;
  return t;
}

}  // namespace hslg
