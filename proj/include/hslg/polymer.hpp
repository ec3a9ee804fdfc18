#pragma once

#include <vector>

#include "hslg/dyadic.hpp"
#include "hslg/environment.hpp"
#include "hslg/numeric.hpp"
#include "hslg/rng.hpp"

namespace hslg {

struct Site {
  int i = 0;
  int j = 0;
  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

enum class Precision { log_float, exact };

// log Z(m,k) on the wedge; exact values kept alongside in exact mode
class LogPartitionTable {
 public:
  int n() const { return n_; }
  bool exact() const { return !exact_.empty(); }
  double log_z(int m, int k) const;
  const Dyadic& exact_z(int m, int k) const;

  friend LogPartitionTable partition_table(const Environment& env, Precision mode);

 private:
  std::size_t idx(int m, int k) const { return static_cast<std::size_t>(m) * (n_ + 1) + k; }

  int n_ = 0;
  std::vector<double> logz_;
  std::vector<Dyadic> exact_;
};

LogPartitionTable partition_table(const Environment& env, Precision mode = Precision::log_float);

// log sum_{p=m}^{N-1} Z(N+p, N-p)
double point_to_line(const LogPartitionTable& t, int m);

struct EndpointPMF {
  int n = 0;
  std::vector<double> probs;  // probs[r] = P(endpoint (N+r, N-r))
};

EndpointPMF endpoint_pmf(const LogPartitionTable& t);

struct PolymerPath {
  std::vector<Site> sites;  // (1,1) first
};

PolymerPath sample_path(const LogPartitionTable& t, const Environment& env, RngStream& rng);

// (log Z(N,N) - log Z(N+r,N-r)) for r = 0..kmax
std::vector<double> increment_vector(const LogPartitionTable& t, int kmax);

}  // namespace hslg
