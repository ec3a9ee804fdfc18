#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hslg/multilayer.hpp"
#include "hslg/polymer.hpp"
#include "hslg/rng.hpp"
#include "hslg/special_fn.hpp"

namespace hslg {

enum class EdgeColor { blue, red, black };

struct Edge {
  Site from, to;
  EdgeColor color;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

bool in_kn(int N, Site v);
bool in_lambda_star(int N, Site v);
std::vector<Edge> kn_edges(int N);

// log W_e(x)
double edge_log_weight(EdgeColor c, const ModelParams& p, double x);

class DiamondDomain {
 public:
  // interior is a connected subset of Lambda*_N; edges are the G_N edges touching it
  static DiamondDomain from_kn(int N, const std::vector<Site>& interior);
  // arbitrary edge set, for tests; every endpoint not in interior becomes boundary
  static DiamondDomain custom(const std::vector<Site>& interior, const std::vector<Edge>& edges);

  const std::vector<Site>& interior() const { return interior_; }
  const std::vector<Site>& boundary() const { return boundary_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int index_of(Site v) const;  // interior first, then boundary; -1 if absent

  struct IEdge {
    int from, to;
    EdgeColor color;
  };
  const std::vector<IEdge>& iedges() const { return iedges_; }
  const std::vector<std::vector<int>>& incident() const { return incident_; }

 private:
  void build();
  std::vector<Site> interior_, boundary_;
  std::vector<Edge> edges_;
  std::vector<IEdge> iedges_;
  std::vector<std::vector<int>> incident_;  // per interior vertex
  std::map<Site, int> index_;
};

// boundary values aligned with domain.boundary(); +inf on a black target drops the edge
double gibbs_log_density(const DiamondDomain& d, const ModelParams& p,
                         const std::vector<double>& interior, const std::vector<double>& boundary);

struct McmcOptions {
  int burn_in = 1000;
  int thin = 10;
  int samples = 1000;
  double width = 2.0;
  double min_ess = 50.0;
};

struct McmcResult {
  std::vector<std::vector<double>> samples;
  double ess = 0.0;  // on the first interior site
  bool converged = false;
  std::string diagnostic;
};

// one slice-sampling update of x under a log-concave log density
double slice_step(const std::function<double(double)>& logf, double x, double width, RngStream& rng);

McmcResult mcmc_sample_gibbs(const DiamondDomain& d, const ModelParams& p,
                             const std::vector<double>& boundary, const McmcOptions& opt,
                             RngStream& rng, std::vector<double> init = {});

// autocorrelation ESS (initial positive sequence)
double effective_sample_size(const std::vector<double>& x);

struct IRWSample {
  int T = 0;
  double a = 0.0, b = 0.0;
  std::vector<double> L1;  // indices 1..2T-2
  std::vector<double> L2;  // indices 1..2T-1
};

// unnormalized log density including the Gamma constants of G_beta
double irw_log_density(const ModelParams& p, const IRWSample& s, bool interaction = true);

// rows 2 and 3 of G_N carry the IRW; this builds that two-row domain with a, b as boundary
DiamondDomain irw_domain(int T);

struct IRWResult {
  std::vector<IRWSample> samples;
  double ess = 0.0;
  bool converged = false;
  std::string diagnostic;
};

// single-site slice sweeps plus prefix-translation moves; interaction=false is the
// diagnostic free-walk mode
IRWResult sample_irw(const ModelParams& p, int T, double a, double b, const McmcOptions& opt,
                     RngStream& rng, bool interaction = true);

struct OrderingReport {
  int n = 0, k = 0, envs = 0;
  double slack = 0.0;
  // per inequality type, fraction of environments with at least one violation
  double rate[4] = {0, 0, 0, 0};
};

// ensembles need curves 1..k+1
OrderingReport ordering_check(const std::vector<LineEnsemble>& ensembles, int k, double slack);
double default_ordering_slack(int N);  // log^2 N

}  // namespace hslg
