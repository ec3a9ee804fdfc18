#pragma once

#include <vector>

#include "hslg/rng.hpp"
#include "hslg/special_fn.hpp"

namespace hslg {

struct WalkSample {
  ModelParams params;
  std::vector<double> S;  // S[0] = 0
  int steps() const { return static_cast<int>(S.size()) - 1; }
};

// one increment log Y2 - log Y1
double sample_increment(const ModelParams& p, RngStream& rng);
WalkSample sample_walk(const ModelParams& p, int n, RngStream& rng);
void extend_walk(WalkSample& w, int more, RngStream& rng);

// p(x) by adaptive quadrature of the y-integral
double increment_density(const ModelParams& p, double x);

// tabulated CDF of p(x) (cumulative quadrature on a fine grid)
class IncrementCdf {
 public:
  explicit IncrementCdf(const ModelParams& p, double step = 1e-3);
  double operator()(double x) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double total_mass() const { return mass_; }

 private:
  double lo_, hi_, h_, mass_;
  std::vector<double> F_;
};

struct QSeries {
  std::vector<double> partial;  // Q_0..Q_M
  int M = 0;
  double value = 1.0;          // Q_M
  double tail_bound = 0.0;     // e^{-S_M}/(e^{tau/2}-1)
  int window = 0;              // lookahead steps that passed the drift check
  double kolmogorov_risk = 0;  // chance the drift check misses a later excursion
  bool converged = false;
};

struct QOptions {
  double epsilon = 1e-10;
  int window = 256;
  int cap = 1 << 20;
};

// extends w as needed
QSeries q_partial(WalkSample& w, const QOptions& opt, RngStream& rng);

struct LimitPmf {
  std::vector<double> probs;  // r = 0..kmax
  double deficit = 0.0;       // 1 - sum
  bool converged = false;
};

LimitPmf limiting_endpoint_pmf(const WalkSample& w, const QSeries& q, int kmax);

struct MaximalReport {
  int steps = 0;  // floor(M sqrt N)
  double bound = 0.0;
  double empirical = 0.0;
  double mc_error = 0.0;
  bool ok = false;
};

double kolmogorov_bound(const ModelParams& p, double M, double N, double lambda);

MaximalReport maximal_inequality_check(const ModelParams& p, double M, int N, double lambda,
                                       int samples, RngStream& rng);

struct DoubleLimitTable {
  std::vector<int> k_grid, n_grid;
  std::vector<std::vector<double>> mean_ratio;   // [n][k]
  std::vector<std::vector<double>> frac_small;   // fraction of walks with ratio < 0.05
  bool monotone = true;                          // every walk nonincreasing in k
};

DoubleLimitTable double_limit_check(const ModelParams& p, const std::vector<int>& k_grid,
                                    const std::vector<int>& n_grid, int samples, RngStream& rng);

}  // namespace hslg
