#pragma once

#include <map>
#include <string>
#include <vector>

#include "hslg/dyadic.hpp"
#include "hslg/environment.hpp"
#include "hslg/polymer.hpp"

namespace hslg {

using LatticePath = std::vector<Site>;

bool is_upright(const LatticePath& p);
std::string step_string(const LatticePath& p);  // 'R' = (+1,0), 'U' = (0,+1)
LatticePath reflect(const LatticePath& p);
std::vector<Site> diagonal_points(const LatticePath& p);
bool paths_intersect(const LatticePath& a, const LatticePath& b);
std::string trace(const LatticePath& p);

struct PathPair {
  int x = 1;
  int m = 0, n = 0;
  LatticePath pi1;  // (1,x+1) -> (m,n)
  LatticePath pi2;  // (1,x) -> (m,n-1)
};

struct MappedPair {
  LatticePath pi1;  // (1,x+1) -> (n-1,m)
  LatticePath pi2;  // (1,x) -> (n,m)
  friend bool operator==(const MappedPair&, const MappedPair&) = default;
  friend auto operator<=>(const MappedPair&, const MappedPair&) = default;
};

struct DiagBook {
  std::vector<Site> points;  // ordered diagonal points of pi1 u pi2
  std::vector<int> owner;    // 1 or 2
  std::vector<Site> spdiag;  // anchors A_1 < ... < A_r
};

DiagBook diagonal_bookkeeping(const PathPair& pair);
void validate_pair(const PathPair& pair);  // throws DomainError

// throws InternalError if a constructed segment intersects
MappedPair apply_umap(const PathPair& pair);

std::vector<PathPair> enumerate_pairs(int x, int m, int n, std::size_t limit = 10'000'000);
std::vector<LatticePath> enumerate_paths(Site from, Site to);

std::size_t count_preimages(const MappedPair& mapped, int x, int m, int n);
std::map<MappedPair, std::size_t> preimage_counts(int x, int m, int n);

// pairs (pi_{2i-1}, pi_{2i}) get x = 2k-2i+1 and target (m, n-2i+2)
std::vector<LatticePath> apply_umap_2k(const std::vector<LatticePath>& tuple, int m, int n);

struct UmapCheck {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  std::string first_failure;  // site-list trace
  std::size_t max_preimages = 0;
};

// properties (a), (b), (c) and the endpoint contract over one exhaustive domain;
// weights checked exactly on senv (must be dyadic)
UmapCheck verify_umap_domain(int x, int m, int n, const SymmetrizedEnvironment& senv);

Dyadic path_weight_exact(const LatticePath& p, const SymmetrizedEnvironment& senv);

struct SbdReport {
  double lhs = 0.0;  // log Z_sym^(2k)(m,n)
  double rhs = 0.0;  // log of the bound
  bool holds = false;
};

SbdReport check_sbd_inequality(const SymmetrizedEnvironment& senv, int m, int n, int k,
                               Precision mode = Precision::exact);

}  // namespace hslg
