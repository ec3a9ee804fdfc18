#include "hslg/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "hslg/errors.hpp"

namespace hslg {

bool in_kn(int N, Site v) { return v.i >= 1 && v.i <= N && v.j >= 1 && v.j <= 2 * N - 2 * v.i + 2; }

bool in_lambda_star(int N, Site v) {
  return v.i >= 1 && v.i <= N - 1 && v.j >= 1 && v.j <= 2 * N - 2 * v.i + 1;
}

std::vector<Edge> kn_edges(int N) {
  std::vector<Edge> e;
  for (int p = 1; p <= N; ++p) {
    for (int q = 1; q <= 2 * N - 2 * p + 2; ++q) {
      if (q % 2 == 1) {
        e.push_back({{p, q}, {p, q + 1}, p % 2 ? EdgeColor::blue : EdgeColor::red});
        if (q >= 3) e.push_back({{p, q}, {p, q - 1}, p % 2 ? EdgeColor::red : EdgeColor::blue});
      } else if (p >= 2) {
        e.push_back({{p, q}, {p - 1, q - 1}, EdgeColor::black});
        e.push_back({{p, q}, {p - 1, q + 1}, EdgeColor::black});
      }
    }
  }
  return e;
}

double edge_log_weight(EdgeColor c, const ModelParams& p, double x) {
  switch (c) {
    case EdgeColor::blue: return (p.theta - p.alpha) * x - std::exp(x);
    case EdgeColor::red: return (p.theta + p.alpha) * x - std::exp(x);
    case EdgeColor::black: return -std::exp(x);
  }
  return 0.0;
}

namespace {

double edge_term(EdgeColor c, const ModelParams& p, double from, double to) {
  // a black edge into +inf carries weight exp(-e^{-inf}) = 1
  if (c == EdgeColor::black && to == std::numeric_limits<double>::infinity()) return 0.0;
  return edge_log_weight(c, p, from - to);
}

}  // namespace

void DiamondDomain::build() {
  index_.clear();
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    if (!index_.emplace(interior_[k], static_cast<int>(k)).second) {
      throw DomainError("duplicate interior vertex");
    }
  }
  boundary_.clear();
  for (const Edge& e : edges_) {
    for (Site v : {e.from, e.to}) {
      if (!index_.count(v)) {
        index_.emplace(v, static_cast<int>(interior_.size() + boundary_.size()));
        boundary_.push_back(v);
      }
    }
  }
  iedges_.clear();
  incident_.assign(interior_.size(), {});
  for (const Edge& e : edges_) {
    const int a = index_.at(e.from), b = index_.at(e.to);
    const int id = static_cast<int>(iedges_.size());
    iedges_.push_back({a, b, e.color});
    if (a < static_cast<int>(interior_.size())) incident_[a].push_back(id);
    if (b < static_cast<int>(interior_.size()) && b != a) incident_[b].push_back(id);
  }
  // connectivity of the interior through interior-interior edges
  if (!interior_.empty()) {
    std::vector<char> seen(interior_.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    const int ni = static_cast<int>(interior_.size());
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int id : incident_[v]) {
        const int w = iedges_[id].from == v ? iedges_[id].to : iedges_[id].from;
        if (w < ni && !seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw DomainError("domain interior is not connected");
    }
  }
}

DiamondDomain DiamondDomain::from_kn(int N, const std::vector<Site>& interior) {
  std::set<Site> in(interior.begin(), interior.end());
  for (Site v : interior) {
    if (!in_lambda_star(N, v)) {
      throw DomainError("vertex (" + std::to_string(v.i) + "," + std::to_string(v.j) +
                        ") outside Lambda*_N");
    }
  }
  DiamondDomain d;
  d.interior_ = interior;
  for (const Edge& e : kn_edges(N))
    if (in.count(e.from) || in.count(e.to)) d.edges_.push_back(e);
  d.build();
  return d;
}

DiamondDomain DiamondDomain::custom(const std::vector<Site>& interior, const std::vector<Edge>& edges) {
  DiamondDomain d;
  d.interior_ = interior;
  d.edges_ = edges;
  d.build();
  return d;
}

int DiamondDomain::index_of(Site v) const {
  auto it = index_.find(v);
  return it == index_.end() ? -1 : it->second;
}

double gibbs_log_density(const DiamondDomain& d, const ModelParams& p,
                         const std::vector<double>& interior, const std::vector<double>& boundary) {
  if (interior.size() != d.interior().size() || boundary.size() != d.boundary().size()) {
    throw DomainError("gibbs_log_density: every vertex needs a value");
  }
  const std::size_t ni = interior.size();
  auto val = [&](int k) { return k < static_cast<int>(ni) ? interior[k] : boundary[k - ni]; };
  double s = 0.0;
  for (const auto& e : d.iedges()) s += edge_term(e.color, p, val(e.from), val(e.to));
  return s;
}

double slice_step(const std::function<double(double)>& logf, double x0, double w, RngStream& rng) {
  const double y = logf(x0) + std::log(rng.uniform());
  double L = x0 - w * rng.uniform();
  double R = L + w;
  // log-concave: stepping out terminates
  while (logf(L) > y) L -= w;
  while (logf(R) > y) R += w;
  for (int it = 0; it < 200; ++it) {
    const double x1 = L + (R - L) * rng.uniform();
    if (logf(x1) > y) return x1;
    if (x1 < x0) L = x1;
    else R = x1;
  }
  return x0;
}

double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  double c0 = 0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  c0 /= n;
  if (c0 <= 0) return static_cast<double>(n);
  auto rho = [&](std::size_t k) {
    double c = 0;
    for (std::size_t i = 0; i + k < n; ++i) c += (x[i] - mean) * (x[i + k] - mean);
    return c / n / c0;
  };
  double tau = -1.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double g = rho(2 * m) + rho(2 * m + 1);
    if (g <= 0) break;
    tau += 2 * g;
  }
  return n / std::max(tau, 1e-12);
}

McmcResult mcmc_sample_gibbs(const DiamondDomain& d, const ModelParams& p,
                             const std::vector<double>& boundary, const McmcOptions& opt,
                             RngStream& rng, std::vector<double> init) {
  const std::size_t ni = d.interior().size();
  if (boundary.size() != d.boundary().size()) throw DomainError("boundary size mismatch");
  for (double b : boundary)
    if (std::isnan(b) || b == -std::numeric_limits<double>::infinity()) {
      throw DomainError("boundary values must be finite or +inf");
    }
  std::vector<double> u = init;
  if (u.empty()) {
    double s = 0;
    int c = 0;
    for (double b : boundary)
      if (std::isfinite(b)) {
        s += b;
        ++c;
      }
    u.assign(ni, c ? s / c : 0.0);
  }
  if (u.size() != ni) throw DomainError("initial state size mismatch");
  auto val = [&](int k) { return k < static_cast<int>(ni) ? u[k] : boundary[k - ni]; };
  McmcResult res;
  std::vector<double> trace;
  const long total = static_cast<long>(opt.burn_in) + static_cast<long>(opt.thin) * opt.samples;
  for (long sweep = 1; sweep <= total; ++sweep) {
    for (std::size_t v = 0; v < ni; ++v) {
      auto logf = [&](double x) {
        double s = 0;
        for (int id : d.incident()[v]) {
          const auto& e = d.iedges()[id];
          const double a = (e.from == static_cast<int>(v)) ? x : val(e.from);
          const double b = (e.to == static_cast<int>(v)) ? x : val(e.to);
          s += edge_term(e.color, p, a, b);
        }
        return s;
      };
      u[v] = slice_step(logf, u[v], opt.width, rng);
    }
    if (sweep > opt.burn_in && (sweep - opt.burn_in) % opt.thin == 0) {
      res.samples.push_back(u);
      if (ni) trace.push_back(u[0]);
    }
  }
  res.ess = effective_sample_size(trace);
  res.converged = res.ess >= std::min(opt.min_ess, 0.5 * opt.samples);
  if (!res.converged) {
    res.diagnostic = "effective sample size " + std::to_string(res.ess) + " below threshold";
  }
  return res;
}

// ---------------- IRW ----------------

namespace {

struct IrwState {
  const ModelParams& p;
  int T;
  bool interaction;
  std::vector<double> u[3];  // u[1], u[2] indexed 1..2T

  double beta(int c, int j) const { return p.theta + (((c + j) % 2 == 0) ? p.alpha : -p.alpha); }

  // log G_beta without the Gamma constant
  double incr(int c, int j, double xj, double xj1) const {
    if (c == 1 && j == 2 * T - 1) return 0.0;
    const double x = (j % 2 ? 1.0 : -1.0) * (xj - xj1);
    return beta(c, j) * x - std::exp(x);
  }
};

}  // namespace

double irw_log_density(const ModelParams& p, const IRWSample& s, bool interaction) {
  const int T = s.T;
  if (static_cast<int>(s.L1.size()) != 2 * T - 2 || static_cast<int>(s.L2.size()) != 2 * T - 1) {
    throw DomainError("irw_log_density: curve lengths must be 2T-2 and 2T-1");
  }
  std::vector<double> u1(2 * T + 1, 0.0), u2(2 * T + 1, 0.0);
  for (int k = 1; k <= 2 * T - 2; ++k) u1[k] = s.L1[k - 1];
  u1[2 * T - 1] = s.a;
  for (int k = 1; k <= 2 * T - 1; ++k) u2[k] = s.L2[k - 1];
  u2[2 * T] = s.b;
  double tot = 0.0;
  for (int c = 1; c <= 2; ++c) {
    const auto& u = (c == 1) ? u1 : u2;
    for (int j = 1; j <= 2 * T - 1; ++j) {
      if (c == 1 && j == 2 * T - 1) continue;
      const double beta = p.theta + (((c + j) % 2 == 0) ? p.alpha : -p.alpha);
      const double x = (j % 2 ? 1.0 : -1.0) * (u[j] - u[j + 1]);
      tot += beta * x - std::exp(x) - std::lgamma(beta);
    }
  }
  if (interaction) {
    for (int j = 1; j <= T - 1; ++j) {
      tot -= std::exp(u2[2 * j] - u1[2 * j - 1]) + std::exp(u2[2 * j] - u1[2 * j + 1]);
    }
  }
  return tot;
}

DiamondDomain irw_domain(int T) {
  if (T < 2) throw DomainError("IRW needs T >= 2");
  // L1 on row 2 (q = 1..2T-2, a at q = 2T-1), L2 on row 3 (q = 1..2T-1, b at q = 2T)
  std::vector<Site> interior;
  for (int q = 1; q <= 2 * T - 2; ++q) interior.push_back({2, q});
  for (int q = 1; q <= 2 * T - 1; ++q) interior.push_back({3, q});
  std::vector<Edge> edges;
  for (int q = 1; q <= 2 * T - 1; q += 2) {
    if (q + 1 <= 2 * T - 2) edges.push_back({{2, q}, {2, q + 1}, EdgeColor::red});
    if (q >= 3) edges.push_back({{2, q}, {2, q - 1}, EdgeColor::blue});
  }
  for (int q = 1; q <= 2 * T - 1; q += 2) {
    edges.push_back({{3, q}, {3, q + 1}, EdgeColor::blue});
    if (q >= 3) edges.push_back({{3, q}, {3, q - 1}, EdgeColor::red});
  }
  for (int j = 1; j <= T - 1; ++j) {
    edges.push_back({{3, 2 * j}, {2, 2 * j - 1}, EdgeColor::black});
    edges.push_back({{3, 2 * j}, {2, 2 * j + 1}, EdgeColor::black});
  }
  return DiamondDomain::custom(interior, edges);
}

IRWResult sample_irw(const ModelParams& p, int T, double a, double b, const McmcOptions& opt,
                     RngStream& rng, bool interaction) {
  if (T < 2) throw DomainError("IRW needs T >= 2");
  IrwState st{p, T, interaction, {}};
  st.u[1].assign(2 * T + 1, a);
  st.u[2].assign(2 * T + 1, b);
  const int F[3] = {0, 2 * T - 2, 2 * T - 1};
  auto& u1 = st.u[1];
  auto& u2 = st.u[2];

  auto site_logf = [&](int c, int k) {
    return [&, c, k](double x) {
      auto& u = st.u[c];
      double s = 0.0;
      if (k >= 2) s += st.incr(c, k - 1, u[k - 1], x);
      s += st.incr(c, k, x, u[k + 1]);
      if (interaction) {
        if (c == 1 && k % 2 == 1) {
          if (k + 1 <= 2 * T - 2) s -= std::exp(u2[k + 1] - x);
          if (k >= 3) s -= std::exp(u2[k - 1] - x);
        } else if (c == 2 && k % 2 == 0 && k / 2 <= T - 1) {
          s -= std::exp(x - u1[k - 1]) + std::exp(x - u1[k + 1]);
        }
      }
      return s;
    };
  };

  // translation of u_c[1..e_c] by delta; only terms straddling the cut change
  auto shift_logf = [&](int e1, int e2) {
    return [&, e1, e2](double d) {
      auto v1 = [&](int k) { return u1[k] + (k <= e1 ? d : 0.0); };
      auto v2 = [&](int k) { return u2[k] + (k <= e2 ? d : 0.0); };
      double s = 0.0;
      if (e1 >= 1) s += st.incr(1, e1, v1(e1), v1(e1 + 1));
      if (e2 >= 1) s += st.incr(2, e2, v2(e2), v2(e2 + 1));
      if (interaction) {
        // black pairs (2,2j)-(1,2j-1) and (2,2j)-(1,2j+1) with mixed membership
        const int lo = std::max(1, std::min(e1, e2) / 2 - 1);
        const int hi = std::min(T - 1, std::max(e1, e2) / 2 + 2);
        for (int j = lo; j <= hi; ++j) {
          const bool s2 = 2 * j <= e2;
          if (s2 != (2 * j - 1 <= e1)) s -= std::exp(v2(2 * j) - v1(2 * j - 1));
          if (s2 != (2 * j + 1 <= e1)) s -= std::exp(v2(2 * j) - v1(2 * j + 1));
        }
      }
      return s;
    };
  };

  IRWResult res;
  std::vector<double> trace;
  const long total = static_cast<long>(opt.burn_in) + static_cast<long>(opt.thin) * opt.samples;
  for (long sweep = 1; sweep <= total; ++sweep) {
    for (int c = 1; c <= 2; ++c)
      for (int k = 1; k <= F[c]; ++k) st.u[c][k] = slice_step(site_logf(c, k), st.u[c][k], opt.width, rng);
    if (interaction) {
      for (int J = 1; J <= 2 * T - 1; ++J) {
        const int e1 = std::min(J, F[1]), e2 = std::min(J, F[2]);
        const double d = slice_step(shift_logf(e1, e2), 0.0, opt.width, rng);
        for (int k = 1; k <= e1; ++k) u1[k] += d;
        for (int k = 1; k <= e2; ++k) u2[k] += d;
      }
    } else {
      for (int c = 1; c <= 2; ++c)
        for (int J = 1; J <= F[c]; ++J) {
          const double d = slice_step(shift_logf(c == 1 ? J : 0, c == 2 ? J : 0), 0.0, opt.width, rng);
          for (int k = 1; k <= J; ++k) st.u[c][k] += d;
        }
    }
    if (sweep > opt.burn_in && (sweep - opt.burn_in) % opt.thin == 0) {
      IRWSample s;
      s.T = T;
      s.a = a;
      s.b = b;
      s.L1.assign(u1.begin() + 1, u1.begin() + 2 * T - 1);
      s.L2.assign(u2.begin() + 1, u2.begin() + 2 * T);
      trace.push_back(s.L1[0]);
      res.samples.push_back(std::move(s));
    }
  }
  res.ess = effective_sample_size(trace);
  res.converged = res.ess >= std::min(opt.min_ess, 0.5 * opt.samples);
  if (!res.converged) res.diagnostic = "effective sample size " + std::to_string(res.ess) + " below threshold";
  return res;
}

// ---------------- ordering ----------------

double default_ordering_slack(int N) {
  const double l = std::log(static_cast<double>(N));
  return l * l;
}

OrderingReport ordering_check(const std::vector<LineEnsemble>& ens, int k, double slack) {
  OrderingReport rep;
  rep.k = k;
  rep.slack = slack;
  rep.envs = static_cast<int>(ens.size());
  if (ens.empty()) return rep;
  rep.n = ens[0].n;
  int bad[4] = {0, 0, 0, 0};
  for (const LineEnsemble& le : ens) {
    if (le.kmax < k + 1) throw DomainError("ordering_check: ensemble needs k+1 curves");
    const int N = le.n;
    bool v[4] = {false, false, false, false};
    for (int i = 1; i <= k; ++i)
      for (int p = 1; p <= N - i; ++p) {
        if (!(le.H(i, 2 * p + 1) <= le.H(i, 2 * p) + slack)) v[0] = true;
        if (!(le.H(i, 2 * p - 1) <= le.H(i, 2 * p) + slack)) v[1] = true;
        if (!(le.H(i + 1, 2 * p) <= le.H(i, 2 * p + 1) + slack)) v[2] = true;
        if (!(le.H(i + 1, 2 * p) <= le.H(i, 2 * p - 1) + slack)) v[3] = true;
      }
    for (int c = 0; c < 4; ++c) bad[c] += v[c];
  }
  for (int c = 0; c < 4; ++c) rep.rate[c] = static_cast<double>(bad[c]) / ens.size();
  return rep;
}

}  // namespace hslg
