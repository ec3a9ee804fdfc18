#pragma once

namespace hslg {

struct ModelParams {
  double theta = 1.0;
  double alpha = -0.5;

  bool bound_phase() const { return alpha < 0.0; }
  // throws DomainError unless theta > 0 and alpha > -theta
  void validate() const;
};

double digamma(double z);
// k in 1..4
double polygamma(int k, double z);

struct Constants {
  double theta = 0.0;
  double alpha = 0.0;
  double R = 0.0;
  double tau = 0.0;
  double sigma2 = 0.0;
  double walkVar = 0.0;

  double deltaK(int k) const;
  // smallest k >= 1 with deltaK(k) > 0; throws if none (alpha == 0)
  int k_star() const;
};

Constants constants(const ModelParams& params);

}  // namespace hslg
