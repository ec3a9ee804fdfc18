#include <doctest.h>

#include <cmath>
#include <map>

#include "hslg/errors.hpp"
#include "hslg/multilayer.hpp"
#include "hslg/polymer.hpp"
#include "oracles.hpp"

using namespace hslg;

namespace {
const ModelParams kP{1.0, -0.5};
}

TEST_CASE("small tables by hand") {
  const Environment e = generate_dyadic_environment(kP, 2, 1, 1);
  const LogPartitionTable t = partition_table(e, Precision::exact);
  CHECK(t.exact_z(2, 1) == Dyadic::from_double(e.w(1, 1)) * Dyadic::from_double(e.w(2, 1)));
  CHECK(t.exact_z(2, 2) ==
        Dyadic::from_double(e.w(1, 1)) * Dyadic::from_double(e.w(2, 1)) * Dyadic::from_double(e.w(2, 2)));
  CHECK(std::fabs(t.log_z(1, 1) - std::log(e.w(1, 1))) < 1e-15);
  const EndpointPMF pmf = endpoint_pmf(t);
  const double z22 = std::exp(t.log_z(2, 2)), z31 = std::exp(t.log_z(3, 1));
  CHECK(pmf.probs[0] == doctest::Approx(z22 / (z22 + z31)).epsilon(1e-13));
  CHECK(pmf.probs[1] == doctest::Approx(1 - pmf.probs[0]).epsilon(1e-13));

  const Environment one = generate_environment(kP, 1, Flavor::standard, 1, 1);
  const LogPartitionTable t1 = partition_table(one);
  CHECK(point_to_line(t1, 0) == std::log(one.w(1, 1)));
}

TEST_CASE("exact mode on non-dyadic env is a mode error") {
  const Environment e = generate_environment(kP, 3, Flavor::standard, 1, 1);
  CHECK_THROWS_AS(partition_table(e, Precision::exact), ModeError);
}

TEST_CASE("DP equals brute force over confined paths") {
  for (int n = 2; n <= 6; ++n) {
    for (int s = 0; s < 5; ++s) {
      const Environment e = generate_dyadic_environment(kP, n, 100 + n, s);
      const LogPartitionTable ex = partition_table(e, Precision::exact);
      const LogPartitionTable fl = partition_table(e, Precision::log_float);
      for (int i = 1; i <= 2 * n - 1; ++i)
        for (int j = 1; j <= std::min(i, 2 * n - i); ++j) {
          const Dyadic bf = oracle::z_bruteforce_exact(e, i, j);
          CHECK(ex.exact_z(i, j) == bf);
          CHECK(std::fabs(fl.log_z(i, j) - bf.log()) <= 1e-10);
        }
      // point-to-line over all confined paths of length 2n-2
      long double s2 = 0;
      for (int p = 0; p < n; ++p) s2 += std::exp((long double)oracle::z_bruteforce_log(e, n + p, n - p));
      CHECK(std::fabs(point_to_line(fl, 0) - (double)std::log(s2)) <= 1e-10);
      for (int m = 0; m + 1 < n; ++m) CHECK(point_to_line(fl, m) >= point_to_line(fl, m + 1));
    }
  }
}

TEST_CASE("point_to_line and increment_vector ranges") {
  const Environment e = generate_environment(kP, 5, Flavor::standard, 2, 2);
  const LogPartitionTable t = partition_table(e);
  CHECK_THROWS_AS(point_to_line(t, 5), DomainError);
  CHECK_THROWS_AS(point_to_line(t, -1), DomainError);
  const auto inc = increment_vector(t, 4);
  CHECK(inc[0] == 0.0);
  CHECK(inc[2] == t.log_z(5, 5) - t.log_z(7, 3));
  CHECK_THROWS_AS(increment_vector(t, 5), DomainError);
}

TEST_CASE("pmf normalization and scale invariance") {
  const Environment e = generate_environment(kP, 40, Flavor::standard, 3, 3);
  const EndpointPMF a = endpoint_pmf(partition_table(e));
  double s = 0;
  for (double p : a.probs) {
    CHECK(p >= 0);
    CHECK(p <= 1);
    s += p;
  }
  CHECK(std::fabs(s - 1) <= 1e-12);
  Environment scaled = e;
  for (int i = 1; i <= 79; ++i)
    for (int j = 1; j <= std::min(i, 80 - i); ++j) scaled.set(i, j, e.w(i, j) * 3.0);
  const EndpointPMF b = endpoint_pmf(partition_table(scaled));
  for (int r = 0; r < 40; ++r) CHECK(std::fabs(a.probs[r] - b.probs[r]) <= 1e-12);
}

namespace {
// the first environment (by stream) whose least likely path has probability >= 0.05,
// so that 1e6 draws resolve every path to well under 2% relative error
Environment resolvable_env_n3() {
  for (std::uint64_t st = 0;; ++st) {
    const Environment e = generate_environment(kP, 3, Flavor::standard, 8, st);
    double total = 0, least = 1e300;
    for (int p = 0; p < 3; ++p)
      for (const auto& path : oracle::confined_paths(3 + p, 3 - p)) {
        double w = 1;
        for (auto s : path) w *= e.w(s.i, s.j);
        total += w;
        least = std::min(least, w);
      }
    if (least / total >= 0.05) return e;
  }
}
}  // namespace

TEST_CASE("path sampler matches exact Gibbs weights at n=3") {
  const Environment e = resolvable_env_n3();
  const LogPartitionTable t = partition_table(e);
  std::map<std::vector<Site>, double> exact;
  double total = 0;
  for (int p = 0; p < 3; ++p)
    for (const auto& path : oracle::confined_paths(3 + p, 3 - p)) {
      double w = 1;
      for (auto s : path) w *= e.w(s.i, s.j);
      exact[path] = w;
      total += w;
    }
  // ballot sequences of length 4
  CHECK(exact.size() == 6);
  std::map<std::vector<Site>, long> freq;
  RngStream rng(1, 1);
  const long draws = 1000000;
  for (long d = 0; d < draws; ++d) {
    const PolymerPath pp = sample_path(t, e, rng);
    for (auto s : pp.sites) REQUIRE(s.j <= s.i);
    ++freq[pp.sites];
  }
  double worst = 0;
  for (const auto& [path, w] : exact) {
    const double prob = w / total;
    worst = std::max(worst, std::fabs(freq[path] / (double)draws - prob) / prob);
  }
  CHECK(freq.size() == exact.size());
  CHECK(worst <= 0.02);
}

TEST_CASE("endpoint pmf vs sampled endpoints n=4") {
  const Environment e = generate_environment(kP, 4, Flavor::standard, 8, 2);
  const LogPartitionTable t = partition_table(e);
  const EndpointPMF pmf = endpoint_pmf(t);
  std::vector<double> freq(4, 0);
  RngStream rng(2, 2);
  const int draws = 1000000;
  for (int d = 0; d < draws; ++d) {
    const auto pp = sample_path(t, e, rng);
    CHECK_MESSAGE(pp.sites.size() == 7, "path length");
    freq[pp.sites.back().i - 4] += 1.0 / draws;
  }
  double tv = 0;
  for (int r = 0; r < 4; ++r) tv += 0.5 * std::fabs(freq[r] - pmf.probs[r]);
  CHECK(tv <= 0.01);
  const Environment e1 = generate_environment(kP, 1, Flavor::standard, 8, 2);
  const auto p1 = sample_path(partition_table(e1), e1, rng);
  CHECK(p1.sites.size() == 1);
}

TEST_CASE("symmetrization identity 2 Z_sym = Z on the wedge") {
  for (int n = 2; n <= 6; ++n) {
    const Environment e = generate_dyadic_environment(kP, n, 5, n);
    const SymmetrizedEnvironment s = symmetrize(e);
    const LogPartitionTable t = partition_table(e, Precision::exact);
    const SymPathTable st(s, 1, true);
    for (int i = 1; i <= 2 * n - 1; ++i)
      for (int j = 1; j <= std::min(i, 2 * n - i); ++j)
        CHECK(st.exact_z(i, j) * Dyadic(2) == t.exact_z(i, j));
  }
}
