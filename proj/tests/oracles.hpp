#pragma once

// independent reference computations used only by tests

#include <vector>

#include "hslg/dyadic.hpp"
#include "hslg/environment.hpp"
#include "hslg/polymer.hpp"

namespace oracle {

// direct series with tail correction
double digamma_series(double z);
double polygamma_series(int k, double z);

// all confined paths (j <= i) from (1,1) to (m,k)
std::vector<std::vector<hslg::Site>> confined_paths(int m, int k);

// exact sum over confined paths of the product of W
hslg::Dyadic z_bruteforce_exact(const hslg::Environment& env, int m, int k);
double z_bruteforce_log(const hslg::Environment& env, int m, int k);

// closed-form density of log Gamma(theta-alpha) - log Gamma(theta+alpha)
double lgrw_density_closed(double theta, double alpha, double x);

// binomial path count (a,b) -> (c,d)
double path_count(int a, int b, int c, int d);

// CDF of log Gamma(beta)
double log_gamma_cdf(double beta, double x);

}  // namespace oracle
