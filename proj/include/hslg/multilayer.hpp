#pragma once

#include <optional>
#include <vector>

#include "hslg/dyadic.hpp"
#include "hslg/environment.hpp"
#include "hslg/polymer.hpp"

namespace hslg {

struct MultilayerValue {
  int m = 0, n = 0, r = 0;
  double log_value = kNegInf;
  std::optional<Dyadic> exact;  // set in exact mode
  bool conditioning_warning = false;
  double cancellation = 1.0;  // float LGV only: Hadamard bound / |det| of the row-scaled matrix
};

// single-path symmetrized partition functions from one start (1,s) over i+j <= 2n
class SymPathTable {
 public:
  SymPathTable(const SymmetrizedEnvironment& senv, int start_j, bool exact,
               bool avoid_diagonal = false);
  double log_z(int i, int j) const;
  const Dyadic& exact_z(int i, int j) const;
  int limit() const { return limit_; }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * (limit_ + 1) + j; }
  int limit_ = 0;  // i+j <= limit
  std::vector<double> logz_;
  std::vector<Dyadic> exact_;
};

MultilayerValue zsym_multi_bruteforce(const SymmetrizedEnvironment& senv, int m, int n, int r);

MultilayerValue zsym_multi_lgv(const SymmetrizedEnvironment& senv, int m, int n, int r,
                               Precision mode);

// log-domain non-intersecting transfer over anti-diagonals; every term positive
MultilayerValue zsym_multi_transfer(const SymmetrizedEnvironment& senv, int m, int n, int r);

MultilayerValue zsym_diag_avoiding(const SymmetrizedEnvironment& senv, int m, int n,
                                   Precision mode = Precision::log_float);

struct VqProfile {
  int q = 0;
  double V = kNegInf;       // log V_q
  double Vtilde = kNegInf;  // log of the diagonal-avoiding sum
  std::optional<Dyadic> V_exact, Vtilde_exact;
};

VqProfile vq_profile(const SymmetrizedEnvironment& senv, int q,
                     Precision mode = Precision::log_float);
// q = 2..2n in one pass
std::vector<VqProfile> vq_profiles(const SymmetrizedEnvironment& senv,
                                   Precision mode = Precision::log_float);

struct LineEnsemble {
  int n = 0;  // N
  int kmax = 0;
  std::vector<std::vector<double>> curves;  // curves[k-1][p-1], p = 1..2N-2k+2

  double H(int k, int p) const;
  int length(int k) const { return 2 * n - 2 * k + 2; }
};

// staircase point of curve p: (N + floor(p/2), N - ceil(p/2) + 1)
Site staircase_point(int N, int p);

// needs senv.n() >= N+1 so that even p (anti-diagonal 2N+1) is covered
LineEnsemble line_ensemble(const SymmetrizedEnvironment& senv, int N, int kmax,
                           Precision mode = Precision::log_float);

// (1/2k) sum_{i<=2k} H^(i)(p) for p = 1..2N-4k+2, via Z^(2k) directly
std::vector<double> top_curve_average(const SymmetrizedEnvironment& senv, int N, int k);

}  // namespace hslg
