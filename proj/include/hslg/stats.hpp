#pragma once

#include <functional>
#include <vector>

#include "hslg/rng.hpp"

namespace hslg {

struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

// asymptotic Kolmogorov tail P(K > lambda)
double kolmogorov_q(double lambda);

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Chi2Result {
  double stat = 0.0;
  int dof = 0;
  double p = 1.0;
};

// bins with expected < min_expected are pooled with their neighbour
Chi2Result chi2_test(const std::vector<double>& observed, const std::vector<double>& expected,
                     int fitted_params = 0, double min_expected = 5.0);

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased
double quantile(std::vector<double> x, double q);  // linear interpolation (type 7)
double median(std::vector<double> x);
double correlation(const std::vector<double>& x, const std::vector<double>& y);

struct Interval {
  double point = 0.0, lo = 0.0, hi = 0.0;
};

// percentile bootstrap
Interval bootstrap_ci(const std::vector<double>& x,
                      const std::function<double(const std::vector<double>&)>& stat,
                      int resamples, double level, RngStream& rng);

}  // namespace hslg
