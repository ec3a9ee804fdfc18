#include "hslg/umap.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "hslg/errors.hpp"
#include "hslg/multilayer.hpp"

namespace hslg {

bool is_upright(const LatticePath& p) {
  for (std::size_t s = 1; s < p.size(); ++s) {
    const int di = p[s].i - p[s - 1].i, dj = p[s].j - p[s - 1].j;
    if (!((di == 1 && dj == 0) || (di == 0 && dj == 1))) return false;
  }
  return !p.empty();
}

std::string step_string(const LatticePath& p) {
  std::string s;
  for (std::size_t k = 1; k < p.size(); ++k) s += (p[k].i > p[k - 1].i) ? 'R' : 'U';
  return s;
}

LatticePath reflect(const LatticePath& p) {
  LatticePath q(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) q[k] = {p[k].j, p[k].i};
  return q;
}

std::vector<Site> diagonal_points(const LatticePath& p) {
  std::vector<Site> d;
  for (const Site& s : p)
    if (s.i == s.j) d.push_back(s);
  return d;
}

bool paths_intersect(const LatticePath& a, const LatticePath& b) {
  // both upright: compare on shared anti-diagonals
  if (a.empty() || b.empty()) return false;
  const int a0 = a[0].i + a[0].j, b0 = b[0].i + b[0].j;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const int t = a0 + static_cast<int>(k);
    const int kb = t - b0;
    if (kb >= 0 && kb < static_cast<int>(b.size()) && b[kb] == a[k]) return true;
  }
  return false;
}

std::string trace(const LatticePath& p) {
  std::ostringstream os;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) os << ' ';
    os << '(' << p[k].i << ',' << p[k].j << ')';
  }
  return os.str();
}

namespace {

std::string pair_trace(const PathPair& p) {
  return "x=" + std::to_string(p.x) + " target=(" + std::to_string(p.m) + "," +
         std::to_string(p.n) + ") pi1: " + trace(p.pi1) + " | pi2: " + trace(p.pi2);
}

// index of a site in an upright path, or -1
int index_of(const LatticePath& p, const Site& s) {
  const int k = (s.i + s.j) - (p[0].i + p[0].j);
  if (k < 0 || k >= static_cast<int>(p.size()) || !(p[k] == s)) return -1;
  return k;
}

}  // namespace

void validate_pair(const PathPair& pr) {
  if (pr.x < 1) throw DomainError("umap: x must be >= 1");
  if (pr.n < 2 || pr.n > pr.m) throw DomainError("umap: target needs 2 <= n <= m");
  if (!is_upright(pr.pi1) || !is_upright(pr.pi2)) throw DomainError("umap: paths must be upright");
  if (!(pr.pi1.front() == Site{1, pr.x + 1}) || !(pr.pi1.back() == Site{pr.m, pr.n})) {
    throw DomainError("umap: pi1 endpoints wrong: " + pair_trace(pr));
  }
  if (!(pr.pi2.front() == Site{1, pr.x}) || !(pr.pi2.back() == Site{pr.m, pr.n - 1})) {
    throw DomainError("umap: pi2 endpoints wrong: " + pair_trace(pr));
  }
  if (paths_intersect(pr.pi1, pr.pi2)) throw DomainError("umap: paths intersect: " + pair_trace(pr));
}

DiagBook diagonal_bookkeeping(const PathPair& pr) {
  DiagBook b;
  std::vector<std::pair<Site, int>> all;
  for (const Site& s : diagonal_points(pr.pi1)) all.push_back({s, 1});
  for (const Site& s : diagonal_points(pr.pi2)) all.push_back({s, 2});
  std::sort(all.begin(), all.end());
  for (const auto& [s, o] : all) {
    b.points.push_back(s);
    b.owner.push_back(o);
  }
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (b.owner[k] != 2) continue;
    const bool prev1 = k > 0 && b.owner[k - 1] == 1;
    const bool next1 = k + 1 < all.size() && b.owner[k + 1] == 1;
    if (prev1 || next1) b.spdiag.push_back(b.points[k]);
  }
  return b;
}

MappedPair apply_umap(const PathPair& pr) {
  validate_pair(pr);
  const DiagBook book = diagonal_bookkeeping(pr);
  if (book.spdiag.empty()) throw InternalError("umap: empty SPDiag for " + pair_trace(pr));
  const LatticePath& o1 = pr.pi1;
  const LatticePath& o2 = pr.pi2;
  LatticePath p1 = o1, p2 = o2;
  const int base1 = o1[0].i + o1[0].j, base2 = o2[0].i + o2[0].j;
  const std::size_t r = book.spdiag.size();

  for (std::size_t a = 0; a + 1 < r; ++a) {
    const Site A = book.spdiag[a], B = book.spdiag[a + 1];
    bool has_pi1 = false;
    for (std::size_t k = 0; k < book.points.size(); ++k) {
      if (book.owner[k] == 1 && A < book.points[k] && book.points[k] < B) has_pi1 = true;
    }
    if (!has_pi1) continue;  // only pi2 between the anchors: keep
    const int ia = index_of(o2, A), ib = index_of(o2, B);
    const LatticePath pi3 = reflect(LatticePath(o2.begin() + ia, o2.begin() + ib + 1));
    int first = -1, last = -1;  // indices into o1
    for (std::size_t k = 0; k < o1.size(); ++k) {
      if (index_of(pi3, o1[k]) >= 0) {
        if (first < 0) first = static_cast<int>(k);
        last = static_cast<int>(k);
      }
    }
    if (first < 0 || first == last) {
      throw InternalError("umap: P1 == P2 or no intersection between anchors: " + pair_trace(pr));
    }
    for (int k = first; k <= last; ++k) {
      const int t = base1 + k;
      const Site s3 = pi3[t - (pi3[0].i + pi3[0].j)];
      const Site s1 = o1[k];
      p1[k] = s3;
      p2[t - base2] = {s1.j, s1.i};
    }
  }

  // terminal segment: A_r -> (m, n-1)
  const Site Ar = book.spdiag.back();
  const int ir = index_of(o2, Ar);
  const LatticePath pi3 = reflect(LatticePath(o2.begin() + ir, o2.end()));
  int P = -1;
  for (std::size_t k = 0; k < o1.size(); ++k) {
    if (index_of(pi3, o1[k]) >= 0) {
      P = static_cast<int>(k);
      break;
    }
  }
  if (P < 0) throw InternalError("umap: terminal reflection never meets pi1: " + pair_trace(pr));
  const int tP = base1 + P;
  MappedPair out;
  out.pi1.assign(p1.begin(), p1.begin() + P);
  for (int k = tP - (pi3[0].i + pi3[0].j); k < static_cast<int>(pi3.size()); ++k) out.pi1.push_back(pi3[k]);
  out.pi2.assign(p2.begin(), p2.begin() + (tP - base2));
  for (int k = P; k < static_cast<int>(o1.size()); ++k) out.pi2.push_back({o1[k].j, o1[k].i});

  if (!is_upright(out.pi1) || !is_upright(out.pi2)) {
    throw InternalError("umap: spliced path not upright: " + pair_trace(pr));
  }
  if (paths_intersect(out.pi1, out.pi2)) {
    throw InternalError("umap: constructed paths intersect: " + pair_trace(pr));
  }
  return out;
}

std::vector<LatticePath> enumerate_paths(Site from, Site to) {
  std::vector<LatticePath> out;
  if (to.i < from.i || to.j < from.j) return out;
  const int len = (to.i - from.i) + (to.j - from.j);
  const int rights = to.i - from.i;
  // walk over all step strings with the right count of R steps
  std::string steps(len, 'U');
  std::fill(steps.begin(), steps.begin() + rights, 'R');
  std::sort(steps.begin(), steps.end());
  do {
    LatticePath p{from};
    for (char c : steps) {
      Site s = p.back();
      if (c == 'R') ++s.i;
      else ++s.j;
      p.push_back(s);
    }
    out.push_back(std::move(p));
  } while (std::next_permutation(steps.begin(), steps.end()));
  return out;
}

std::vector<PathPair> enumerate_pairs(int x, int m, int n, std::size_t limit) {
  const auto l1 = enumerate_paths({1, x + 1}, {m, n});
  const auto l2 = enumerate_paths({1, x}, {m, n - 1});
  std::vector<PathPair> out;
  for (const auto& a : l1) {
    for (const auto& b : l2) {
      if (paths_intersect(a, b)) continue;
      if (out.size() >= limit) throw DomainError("enumerate_pairs: limit exceeded");
      out.push_back({x, m, n, a, b});
    }
  }
  return out;
}

std::map<MappedPair, std::size_t> preimage_counts(int x, int m, int n) {
  std::map<MappedPair, std::size_t> counts;
  for (const auto& pr : enumerate_pairs(x, m, n)) ++counts[apply_umap(pr)];
  return counts;
}

std::size_t count_preimages(const MappedPair& mapped, int x, int m, int n) {
  std::size_t c = 0;
  for (const auto& pr : enumerate_pairs(x, m, n))
    if (apply_umap(pr) == mapped) ++c;
  return c;
}

std::vector<LatticePath> apply_umap_2k(const std::vector<LatticePath>& tuple, int m, int n) {
  if (tuple.empty() || tuple.size() % 2) throw DomainError("apply_umap_2k: need an even tuple");
  const int k = static_cast<int>(tuple.size() / 2);
  std::vector<LatticePath> out;
  for (int i = 1; i <= k; ++i) {
    PathPair pr{2 * k - 2 * i + 1, m, n - 2 * i + 2, tuple[2 * i - 2], tuple[2 * i - 1]};
    MappedPair mp = apply_umap(pr);
    out.push_back(std::move(mp.pi1));
    out.push_back(std::move(mp.pi2));
  }
  return out;
}

Dyadic path_weight_exact(const LatticePath& p, const SymmetrizedEnvironment& senv) {
  Dyadic w(1);
  for (const Site& s : p) w *= senv.exact_w(s.i, s.j);
  return w;
}

UmapCheck verify_umap_domain(int x, int m, int n, const SymmetrizedEnvironment& senv) {
  UmapCheck c;
  std::map<MappedPair, std::size_t> counts;
  auto fail = [&](const std::string& what, const PathPair& pr) {
    if (c.violations++ == 0) c.first_failure = what + ": " + pair_trace(pr);
  };
  for (const auto& pr : enumerate_pairs(x, m, n)) {
    ++c.pairs;
    MappedPair mp;
    try {
      mp = apply_umap(pr);
    } catch (const InternalError& e) {
      fail(e.what(), pr);
      continue;
    }
    ++counts[mp];
    if (!diagonal_points(mp.pi1).empty()) fail("(a) pi1' touches the diagonal", pr);
    std::set<Site> before, after;
    for (const Site& s : diagonal_points(pr.pi1)) before.insert(s);
    for (const Site& s : diagonal_points(pr.pi2)) before.insert(s);
    for (const Site& s : diagonal_points(mp.pi2)) after.insert(s);
    if (before != after) fail("(a) diagonal set not transferred", pr);
    if (!(mp.pi1.front() == Site{1, x + 1}) || !(mp.pi1.back() == Site{n - 1, m}) ||
        !(mp.pi2.front() == Site{1, x}) || !(mp.pi2.back() == Site{n, m})) {
      fail("endpoint contract", pr);
    }
    const Dyadic w0 = path_weight_exact(pr.pi1, senv) * path_weight_exact(pr.pi2, senv);
    const Dyadic w1 = path_weight_exact(mp.pi1, senv) * path_weight_exact(mp.pi2, senv);
    if (!(w0 == w1)) fail("(b) weight not preserved", pr);
  }
  for (const auto& [mp, cnt] : counts) {
    c.max_preimages = std::max(c.max_preimages, cnt);
    const std::size_t d = diagonal_points(mp.pi2).size();
    if (cnt > (std::size_t{1} << d) || cnt > (std::size_t{1} << n)) {
      if (c.violations++ == 0) {
        c.first_failure = "(c) " + std::to_string(cnt) + " preimages of pi1': " + trace(mp.pi1) +
                          " | pi2': " + trace(mp.pi2);
      }
    }
  }
  return c;
}

SbdReport check_sbd_inequality(const SymmetrizedEnvironment& senv, int m, int n, int k,
                               Precision mode) {
  if (mode != Precision::exact) throw ModeError("check_sbd_inequality runs in exact mode only");
  if (k < 1 || n < 2 * k || n > m) throw DomainError("check_sbd_inequality: need 2k <= n <= m");
  if (m + n > 2 * senv.n()) throw DomainError("check_sbd_inequality: environment too small");
  const MultilayerValue z = zsym_multi_lgv(senv, m, n, 2 * k, Precision::exact);
  const auto vq = vq_profiles(senv, Precision::exact);  // vq[q-2]
  Dyadic lhs = *z.exact;
  double log_corr = 0.0;
  for (int i = 2; i <= 2 * k; ++i) {
    for (int j = 1; j <= i - 1; ++j) {
      lhs *= senv.exact_w(1, j);
      log_corr += senv.log_w(1, j);
    }
  }
  Dyadic rhs = Dyadic::pow2(n);
  double log_rhs = n * std::log(2.0) - log_corr;
  for (int i = 1; i <= k; ++i) {
    const VqProfile& v = vq[m + n + 2 - 2 * i - 2];
    const VqProfile& vt = vq[m + n + 1 - 2 * i - 2];
    rhs *= *v.V_exact;
    rhs *= *vt.Vtilde_exact;
    log_rhs += v.V + vt.Vtilde;
  }
  SbdReport rep;
  rep.lhs = z.log_value;
  rep.rhs = log_rhs;
  rep.holds = (lhs <= rhs);
  return rep;
}

}  // namespace hslg
