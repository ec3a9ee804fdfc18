#include "hslg/multilayer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include "hslg/errors.hpp"

namespace hslg {

namespace {
constexpr double kLog2 = 0.6931471805599453;

MultilayerValue make_value(int m, int n, int r) {
  MultilayerValue v;
  v.m = m;
  v.n = n;
  v.r = r;
  return v;
}

std::string pt(int m, int n) { return "(" + std::to_string(m) + "," + std::to_string(n) + ")"; }

void check_target(const SymmetrizedEnvironment& senv, int m, int n, int r) {
  if (r < 0) throw DomainError("layer count must be >= 0");
  if (m < 1 || n < 1) throw DomainError("target " + pt(m, n) + " outside quadrant");
  if (!senv.contains(m, n)) {
    throw DomainError("target " + pt(m, n) + " beyond environment range i+j <= 2n");
  }
}
}  // namespace

SymPathTable::SymPathTable(const SymmetrizedEnvironment& senv, int start_j, bool exact,
                           bool avoid_diagonal)
    : limit_(2 * senv.n()) {
  if (exact && senv.base().kind() != WeightKind::dyadic) {
    throw ModeError("exact mode requires a dyadic-weight environment");
  }
  const std::size_t sz = static_cast<std::size_t>(limit_ + 1) * (limit_ + 1);
  logz_.assign(sz, kNegInf);
  if (exact) exact_.assign(sz, Dyadic());
  if (1 + start_j > limit_) return;
  for (int i = 1; i < limit_; ++i) {
    for (int j = start_j; i + j <= limit_; ++j) {
      const bool start = (i == 1 && j == start_j);
      if (avoid_diagonal && i == j && !start) continue;
      double lz;
      if (start) {
        lz = 0.0;
      } else {
        const double a = (i > 1) ? logz_[idx(i - 1, j)] : kNegInf;
        const double b = (j > start_j) ? logz_[idx(i, j - 1)] : kNegInf;
        lz = log_add(a, b);
      }
      if (lz == kNegInf) continue;
      logz_[idx(i, j)] = lz + senv.log_w(i, j);
      if (exact) {
        Dyadic z;
        if (start) {
          z = Dyadic(1);
        } else {
          if (i > 1) z += exact_[idx(i - 1, j)];
          if (j > start_j) z += exact_[idx(i, j - 1)];
        }
        exact_[idx(i, j)] = z * senv.exact_w(i, j);
      }
    }
  }
}

double SymPathTable::log_z(int i, int j) const {
  if (i < 1 || j < 1 || i + j > limit_) throw DomainError("sym table: " + pt(i, j) + " out of range");
  return logz_[idx(i, j)];
}

const Dyadic& SymPathTable::exact_z(int i, int j) const {
  if (exact_.empty()) throw ModeError("sym table built without exact values");
  if (i < 1 || j < 1 || i + j > limit_) throw DomainError("sym table: " + pt(i, j) + " out of range");
  return exact_[idx(i, j)];
}

// ---------------- brute force ----------------

namespace {

using Mask = std::array<std::uint64_t, 4>;

struct EnumPath {
  Mask mask{};
  double logw = 0.0;
  Dyadic w;
};

void enum_paths(const SymmetrizedEnvironment& senv, int i, int j, int ei, int ej, int width,
                std::vector<Site>& cur, bool exact, std::vector<EnumPath>& out) {
  cur.push_back({i, j});
  if (i == ei && j == ej) {
    EnumPath p;
    p.w = Dyadic(1);
    for (const Site& s : cur) {
      const int c = (s.i - 1) * width + (s.j - 1);
      p.mask[c >> 6] |= (1ull << (c & 63));
      p.logw += senv.log_w(s.i, s.j);
      if (exact) p.w *= senv.exact_w(s.i, s.j);
    }
    out.push_back(std::move(p));
  } else {
    if (i < ei) enum_paths(senv, i + 1, j, ei, ej, width, cur, exact, out);
    if (j < ej) enum_paths(senv, i, j + 1, ei, ej, width, cur, exact, out);
  }
  cur.pop_back();
}

bool disjoint(const Mask& a, const Mask& b) {
  for (int k = 0; k < 4; ++k)
    if (a[k] & b[k]) return false;
  return true;
}

void combine(const std::vector<std::vector<EnumPath>>& lists, std::size_t a, Mask used,
             double logw, const Dyadic* w, bool exact, std::vector<double>& logs, Dyadic& sum) {
  if (a == lists.size()) {
    logs.push_back(logw);
    if (exact) sum += *w;
    return;
  }
  for (const EnumPath& p : lists[a]) {
    if (!disjoint(used, p.mask)) continue;
    Mask u = used;
    for (int k = 0; k < 4; ++k) u[k] |= p.mask[k];
    if (exact) {
      Dyadic nw = *w * p.w;
      combine(lists, a + 1, u, logw + p.logw, &nw, exact, logs, sum);
    } else {
      combine(lists, a + 1, u, logw + p.logw, nullptr, exact, logs, sum);
    }
  }
}

}  // namespace

MultilayerValue zsym_multi_bruteforce(const SymmetrizedEnvironment& senv, int m, int n, int r) {
  check_target(senv, m, n, r);
  MultilayerValue v = make_value(m, n, r);
  const bool exact = senv.base().kind() == WeightKind::dyadic;
  if (r == 0) {
    v.log_value = 0.0;
    if (exact) v.exact = Dyadic(1);
    return v;
  }
  if (n < r) {
    if (exact) v.exact = Dyadic();
    return v;
  }
  // path a runs (1, r-a+1) -> (m, n-a+1) and has m + n - r - 1 + ... cells
  long cells = 0;
  for (int a = 1; a <= r; ++a) cells += (m - 1) + (n - a + 1 - (r - a + 1)) + 1;
  if (cells > 48 || m * n > 256) {
    throw DomainError("zsym_multi_bruteforce: instance too large (" + std::to_string(cells) +
                      " cells)");
  }
  std::vector<std::vector<EnumPath>> lists(r);
  std::vector<Site> cur;
  for (int a = 1; a <= r; ++a) {
    enum_paths(senv, 1, r - a + 1, m, n - a + 1, n, cur, exact, lists[a - 1]);
  }
  std::vector<double> logs;
  Dyadic sum;
  Dyadic one(1);
  combine(lists, 0, Mask{}, 0.0, &one, exact, logs, sum);
  v.log_value = log_sum_exp(logs);
  if (exact) {
    v.exact = sum;
    if (!sum.is_zero()) v.log_value = sum.log();
  }
  return v;
}

// ---------------- LGV ----------------

namespace {

Dyadic det_leibniz(const std::vector<std::vector<Dyadic>>& A) {
  const int r = static_cast<int>(A.size());
  std::vector<int> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  Dyadic det;
  do {
    // parity by counting inversions
    int inv = 0;
    for (int a = 0; a < r; ++a)
      for (int b = a + 1; b < r; ++b)
        if (perm[a] > perm[b]) ++inv;
    Dyadic term(1);
    bool zero = false;
    for (int a = 0; a < r && !zero; ++a) {
      if (A[a][perm[a]].is_zero()) zero = true;
      else term *= A[a][perm[a]];
    }
    if (zero) continue;
    if (inv % 2) det -= term;
    else det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

}  // namespace

MultilayerValue zsym_multi_lgv(const SymmetrizedEnvironment& senv, int m, int n, int r,
                               Precision mode) {
  check_target(senv, m, n, r);
  MultilayerValue v = make_value(m, n, r);
  const bool exact = (mode == Precision::exact);
  if (exact && senv.base().kind() != WeightKind::dyadic) {
    throw ModeError("exact mode requires a dyadic-weight environment");
  }
  if (r == 0) {
    v.log_value = 0.0;
    if (exact) v.exact = Dyadic(1);
    return v;
  }
  if (n < r) {
    if (exact) v.exact = Dyadic();
    return v;
  }
  if (r > 8) throw DomainError("zsym_multi_lgv: r > 8 not supported");
  std::vector<SymPathTable> tabs;
  tabs.reserve(r);
  for (int a = 1; a <= r; ++a) tabs.emplace_back(senv, r - a + 1, exact);

  if (exact) {
    std::vector<std::vector<Dyadic>> A(r, std::vector<Dyadic>(r));
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) A[a][b] = tabs[a].exact_z(m, n - b);
    const Dyadic d = det_leibniz(A);
    if (d.sign() < 0) throw InternalError("LGV determinant negative in exact mode");
    v.exact = d;
    v.log_value = d.is_zero() ? kNegInf : d.log();
    return v;
  }

  // float: scale each row by its max, LU with partial pivoting
  std::vector<std::vector<double>> B(r, std::vector<double>(r));
  double log_scale = 0.0;
  double hadamard = 1.0;
  for (int a = 0; a < r; ++a) {
    double mx = kNegInf;
    for (int b = 0; b < r; ++b) mx = std::max(mx, tabs[a].log_z(m, n - b));
    if (mx == kNegInf) throw ConditioningError("LGV row vanishes; use exact mode");
    double nrm = 0.0;
    for (int b = 0; b < r; ++b) {
      B[a][b] = std::exp(tabs[a].log_z(m, n - b) - mx);
      nrm += B[a][b] * B[a][b];
    }
    hadamard *= std::sqrt(nrm);
    log_scale += mx;
  }
  double det = 1.0;
  for (int c = 0; c < r; ++c) {
    int piv = c;
    for (int a = c + 1; a < r; ++a)
      if (std::fabs(B[a][c]) > std::fabs(B[piv][c])) piv = a;
    if (B[piv][c] == 0.0) {
      det = 0.0;
      break;
    }
    if (piv != c) {
      std::swap(B[piv], B[c]);
      det = -det;
    }
    det *= B[c][c];
    for (int a = c + 1; a < r; ++a) {
      const double f = B[a][c] / B[c][c];
      for (int b = c; b < r; ++b) B[a][b] -= f * B[c][b];
    }
  }
  if (!(det > 0.0) || !std::isfinite(det)) {
    throw ConditioningError("float LGV determinant not positive at " + pt(m, n) + ", r=" +
                            std::to_string(r) + "; use exact mode");
  }
  v.cancellation = hadamard / det;
  v.conditioning_warning = v.cancellation > 1e8;
  v.log_value = log_scale + std::log(det);
  return v;
}

// ---------------- transfer ----------------

MultilayerValue zsym_multi_transfer(const SymmetrizedEnvironment& senv, int m, int n, int r) {
  check_target(senv, m, n, r);
  MultilayerValue v = make_value(m, n, r);
  if (r == 0) {
    v.log_value = 0.0;
    return v;
  }
  if (n < r) return v;
  if (r > 8 || m > 255) throw DomainError("zsym_multi_transfer: r <= 8 and m <= 255 required");
  // path a (1..r, top first) occupies (i, t-i) at time t in [r-a+2, m+n-a+1]
  // state: i-coordinates of active paths packed 8 bits each, lowest a first
  auto first_active = [&](int t) { return std::max(1, r + 2 - t); };
  auto last_active = [&](int t) { return std::min(r, m + n + 1 - t); };

  std::unordered_map<std::uint64_t, double> cur, nxt;
  // t = 2: only path r at (1,1)
  {
    const double lw = senv.log_w(1, 1);
    cur[1ull] = lw;
  }
  for (int t = 2; t < m + n; ++t) {
    nxt.clear();
    const int fa = first_active(t), la = last_active(t);
    const int nfa = first_active(t + 1), nla = last_active(t + 1);
    const int cnt = la - fa + 1;
    for (const auto& [key, lw] : cur) {
      int pos[8];
      for (int k = 0; k < cnt; ++k) pos[k] = static_cast<int>((key >> (8 * k)) & 0xff);
      // paths fa..la; those with a > nla end at time t (must sit at i = m)
      bool ok = true;
      for (int a = nla + 1; a <= la; ++a)
        if (pos[a - fa] != m) ok = false;
      if (!ok) continue;
      const int keep_lo = std::max(fa, nfa), keep_hi = std::min(la, nla);
      const int keep = keep_hi - keep_lo + 1;
      const bool newpath = (nfa < fa);  // path nfa starts at time t+1
      for (int combo = 0; combo < (1 << std::max(keep, 0)); ++combo) {
        int np[8];
        int cntn = 0;
        if (newpath) np[cntn++] = 1;
        bool good = true;
        for (int a = keep_lo; a <= keep_hi; ++a) {
          const int i = pos[a - fa] + ((combo >> (a - keep_lo)) & 1);
          const int j = t + 1 - i;
          if (i > m || j > n - a + 1) {
            good = false;
            break;
          }
          np[cntn++] = i;
        }
        if (!good) continue;
        for (int k = 1; k < cntn; ++k)
          if (np[k] <= np[k - 1]) good = false;
        if (!good) continue;
        double w = lw;
        std::uint64_t nk = 0;
        for (int k = 0; k < cntn; ++k) {
          w += senv.log_w(np[k], t + 1 - np[k]);
          nk |= static_cast<std::uint64_t>(np[k]) << (8 * k);
        }
        auto it = nxt.find(nk);
        if (it == nxt.end()) nxt.emplace(nk, w);
        else it->second = log_add(it->second, w);
      }
    }
    std::swap(cur, nxt);
  }
  // at t = m+n only path 1 is active and must be at i = m
  double total = kNegInf;
  for (const auto& [key, lw] : cur)
    if (static_cast<int>(key & 0xff) == m) total = log_add(total, lw);
  v.log_value = total;
  return v;
}

// ---------------- diagonal avoiding, V_q ----------------

MultilayerValue zsym_diag_avoiding(const SymmetrizedEnvironment& senv, int m, int n,
                                   Precision mode) {
  check_target(senv, m, n, 1);
  if (m == n) throw DomainError("zsym_diag_avoiding: diagonal endpoint " + pt(m, n));
  const bool exact = (mode == Precision::exact);
  SymPathTable t(senv, 1, exact, true);
  MultilayerValue v = make_value(m, n, 1);
  v.log_value = t.log_z(m, n);
  if (exact) v.exact = t.exact_z(m, n);
  return v;
}

namespace {

VqProfile vq_from_tables(const SymPathTable& full, const SymPathTable& avoid, int q, bool exact) {
  VqProfile out;
  out.q = q;
  std::vector<double> a, b;
  Dyadic ea, eb;
  for (int i = 1; i <= q - 1; ++i) {
    const int j = q - i;
    a.push_back(full.log_z(i, j));
    if (exact) ea += full.exact_z(i, j);
    if (i != j) {
      b.push_back(avoid.log_z(i, j));
      if (exact) eb += avoid.exact_z(i, j);
    }
  }
  out.V = log_sum_exp(a);
  out.Vtilde = log_sum_exp(b);
  if (exact) {
    out.V_exact = ea;
    out.Vtilde_exact = eb;
    out.V = ea.is_zero() ? kNegInf : ea.log();
    out.Vtilde = eb.is_zero() ? kNegInf : eb.log();
  }
  return out;
}

}  // namespace

VqProfile vq_profile(const SymmetrizedEnvironment& senv, int q, Precision mode) {
  if (q < 2 || q > 2 * senv.n()) throw DomainError("vq_profile: q out of range 2..2n");
  const bool exact = (mode == Precision::exact);
  SymPathTable full(senv, 1, exact), avoid(senv, 1, exact, true);
  return vq_from_tables(full, avoid, q, exact);
}

std::vector<VqProfile> vq_profiles(const SymmetrizedEnvironment& senv, Precision mode) {
  const bool exact = (mode == Precision::exact);
  SymPathTable full(senv, 1, exact), avoid(senv, 1, exact, true);
  std::vector<VqProfile> out;
  for (int q = 2; q <= 2 * senv.n(); ++q) out.push_back(vq_from_tables(full, avoid, q, exact));
  return out;
}

// ---------------- line ensemble ----------------

Site staircase_point(int N, int p) { return {N + p / 2, N - (p + 1) / 2 + 1}; }

double LineEnsemble::H(int k, int p) const {
  if (k < 1 || k > kmax || p < 1 || p > length(k)) {
    throw DomainError("H(" + std::to_string(k) + "," + std::to_string(p) + ") out of range");
  }
  return curves[k - 1][p - 1];
}

LineEnsemble line_ensemble(const SymmetrizedEnvironment& senv, int N, int kmax, Precision mode) {
  if (N < 1 || kmax < 1 || kmax > N) throw DomainError("line_ensemble: need 1 <= kmax <= N");
  if (senv.n() < N + 1) {
    throw DomainError("line_ensemble: environment size must be >= N+1 to reach anti-diagonal 2N+1");
  }
  const bool exact = (mode == Precision::exact);
  LineEnsemble le;
  le.n = N;
  le.kmax = kmax;
  le.curves.resize(kmax);
  SymPathTable single(senv, 1, exact);
  const LogPartitionTable poly = partition_table(senv.base(), Precision::log_float);
  // logZ^(k-1) at each staircase point, reused between curves
  std::vector<double> prev(2 * N, 0.0);
  for (int k = 1; k <= kmax; ++k) {
    const int len = 2 * N - 2 * k + 2;
    le.curves[k - 1].resize(len);
    for (int p = 1; p <= len; ++p) {
      const Site s = staircase_point(N, p);
      double lz;
      if (k == 1) {
        lz = exact ? single.exact_z(s.i, s.j).log() : single.log_z(s.i, s.j);
      } else if (exact) {
        lz = zsym_multi_lgv(senv, s.i, s.j, k, Precision::exact).log_value;
      } else {
        lz = zsym_multi_transfer(senv, s.i, s.j, k).log_value;
      }
      le.curves[k - 1][p - 1] = kLog2 + lz - prev[p - 1];
      prev[p - 1] = lz;
    }
    if (k == 1) {
      for (int p = 1; p <= len; ++p) {
        const Site s = staircase_point(N, p);
        if (std::fabs(le.curves[0][p - 1] - poly.log_z(s.i, s.j)) > 1e-9 * (1.0 + std::fabs(poly.log_z(s.i, s.j)))) {
          throw InternalError("curve 1 disagrees with the polymer table at p=" + std::to_string(p));
        }
      }
    }
  }
  return le;
}

std::vector<double> top_curve_average(const SymmetrizedEnvironment& senv, int N, int k) {
  if (k < 1 || 2 * k > N) throw DomainError("top_curve_average: need 1 <= 2k <= N");
  if (senv.n() < N + 1) throw DomainError("top_curve_average: environment size must be >= N+1");
  const int len = 2 * N - 4 * k + 2;
  std::vector<double> out(len);
  for (int p = 1; p <= len; ++p) {
    const Site s = staircase_point(N, p);
    const double lz = zsym_multi_transfer(senv, s.i, s.j, 2 * k).log_value;
    out[p - 1] = (2 * k * kLog2 + lz) / (2.0 * k);
  }
  return out;
}

}  // namespace hslg
