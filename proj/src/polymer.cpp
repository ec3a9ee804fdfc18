#include "hslg/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hslg/errors.hpp"

namespace hslg {

double LogPartitionTable::log_z(int m, int k) const {
  if (!Environment::in_wedge(n_, m, k)) {
    throw DomainError("Z(" + std::to_string(m) + "," + std::to_string(k) + ") outside wedge");
  }
  return logz_[idx(m, k)];
}

const Dyadic& LogPartitionTable::exact_z(int m, int k) const {
  if (exact_.empty()) throw ModeError("table was built in log-float mode");
  if (!Environment::in_wedge(n_, m, k)) {
    throw DomainError("Z(" + std::to_string(m) + "," + std::to_string(k) + ") outside wedge");
  }
  return exact_[idx(m, k)];
}

LogPartitionTable partition_table(const Environment& env, Precision mode) {
  if (mode == Precision::exact && env.kind() != WeightKind::dyadic) {
    throw ModeError("exact mode requires a dyadic-weight environment");
  }
  const int n = env.n();
  LogPartitionTable t;
  t.n_ = n;
  const std::size_t sz = static_cast<std::size_t>(2 * n + 1) * (n + 1);
  t.logz_.assign(sz, kNegInf);
  const bool ex = (mode == Precision::exact);
  if (ex) t.exact_.assign(sz, Dyadic());
  for (int i = 1; i <= 2 * n - 1; ++i) {
    const int jmax = std::min(i, 2 * n - i);
    for (int j = 1; j <= jmax; ++j) {
      double lz;
      if (i == 1) {
        lz = 0.0;
      } else if (i == j) {
        lz = t.logz_[t.idx(i, j - 1)];
      } else if (j == 1) {
        lz = t.logz_[t.idx(i - 1, j)];
      } else {
        lz = log_add(t.logz_[t.idx(i - 1, j)], t.logz_[t.idx(i, j - 1)]);
      }
      t.logz_[t.idx(i, j)] = lz + env.log_w(i, j);
      if (ex) {
        Dyadic z;
        if (i == 1) {
          z = Dyadic(1);
        } else if (i == j) {
          z = t.exact_[t.idx(i, j - 1)];
        } else if (j == 1) {
          z = t.exact_[t.idx(i - 1, j)];
        } else {
          z = t.exact_[t.idx(i - 1, j)] + t.exact_[t.idx(i, j - 1)];
        }
        t.exact_[t.idx(i, j)] = z * Dyadic::from_double(env.w(i, j));
      }
    }
  }
  return t;
}

double point_to_line(const LogPartitionTable& t, int m) {
  const int n = t.n();
  if (m < 0 || m > n - 1) throw DomainError("point_to_line: m out of range 0..n-1");
  std::vector<double> v;
  v.reserve(n - m);
  for (int p = m; p <= n - 1; ++p) v.push_back(t.log_z(n + p, n - p));
  return log_sum_exp(v);
}

EndpointPMF endpoint_pmf(const LogPartitionTable& t) {
  const int n = t.n();
  EndpointPMF pmf;
  pmf.n = n;
  const double lz = point_to_line(t, 0);
  pmf.probs.resize(n);
  double s = 0.0;
  for (int r = 0; r < n; ++r) {
    pmf.probs[r] = std::exp(t.log_z(n + r, n - r) - lz);
    s += pmf.probs[r];
  }
  for (double& p : pmf.probs) p /= s;
  return pmf;
}

PolymerPath sample_path(const LogPartitionTable& t, const Environment& env, RngStream& rng) {
  if (env.n() != t.n()) throw DomainError("sample_path: table and environment sizes differ");
  const int n = t.n();
  const EndpointPMF pmf = endpoint_pmf(t);
  double u = rng.uniform();
  int r = 0;
  for (; r < n - 1; ++r) {
    if (u < pmf.probs[r]) break;
    u -= pmf.probs[r];
  }
  PolymerPath path;
  path.sites.resize(2 * n - 1);
  int i = n + r, j = n - r;
  for (int s = 2 * n - 2; s >= 0; --s) {
    path.sites[s] = {i, j};
    if (s == 0) break;
    if (i == j) {
      --j;
    } else if (j == 1) {
      --i;
    } else {
      const double a = t.log_z(i - 1, j);
      const double b = t.log_z(i, j - 1);
      // P(left) = Z(i-1,j) / (Z(i-1,j) + Z(i,j-1))
      const double pl = 1.0 / (1.0 + std::exp(b - a));
      if (rng.uniform() < pl) {
        --i;
      } else {
        --j;
      }
    }
  }
  return path;
}

std::vector<double> increment_vector(const LogPartitionTable& t, int kmax) {
  const int n = t.n();
  if (kmax < 0 || kmax > n - 1) throw DomainError("increment_vector: kmax out of range");
  std::vector<double> v(kmax + 1);
  const double d = t.log_z(n, n);
  for (int r = 0; r <= kmax; ++r) v[r] = (r == 0) ? 0.0 : d - t.log_z(n + r, n - r);
  return v;
}

}  // namespace hslg
