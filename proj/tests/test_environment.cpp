#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hslg/errors.hpp"
#include "hslg/environment.hpp"
#include "hslg/rng.hpp"
#include "hslg/special_fn.hpp"
#include "oracles.hpp"

using namespace hslg;

TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32Ctr{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu}) ==
        Philox4x32Ctr{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32Ctr{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("rng stream replay and independence") {
  RngStream a(42, 7, 3), b(42, 7, 3), c(42, 8, 3);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    if (x != c.next_u64()) differs = true;
  }
  CHECK(differs);
  RngStream u(1, 2);
  double mn = 1, mx = 0, s = 0;
  for (int k = 0; k < 100000; ++k) {
    const double v = u.uniform();
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    s += v;
  }
  CHECK(mn > 0.0);
  CHECK(mx < 1.0);
  CHECK(std::fabs(s / 100000 - 0.5) < 0.005);
}

TEST_CASE("inverse gamma sampler moments") {
  RngStream r(11, 0);
  const int n = 1000000;
  double sl = 0, sm = 0;
  for (int k = 0; k < n; ++k) sl += std::log(sample_inverse_gamma(1.0, r));
  CHECK(std::fabs(sl / n - 0.5772156649015329) < 0.01);
  for (int k = 0; k < n; ++k) sm += sample_inverse_gamma(3.0, r);
  CHECK(std::fabs(sm / n - 0.5) < 0.01);
  // small shape: E log G = digamma(beta)
  double sg = 0;
  for (int k = 0; k < 200000; ++k) sg += sample_log_gamma(0.2, r);
  CHECK(std::fabs(sg / 200000 - digamma(0.2)) < 0.05);
  RngStream p(5, 5, 99), q(5, 5, 99);
  CHECK(sample_inverse_gamma(0.7, p) == sample_inverse_gamma(0.7, q));
  CHECK_THROWS_AS(sample_inverse_gamma(0.0, p), DomainError);
}

namespace {
// one-sample KS statistic, used only here as a cheap check
double ks_stat(std::vector<double> x, auto cdf) {
  std::sort(x.begin(), x.end());
  const double n = x.size();
  double d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}
}  // namespace

TEST_CASE("site laws by flavor") {
  const ModelParams p{1.0, -0.5};
  CHECK(site_shape(p, Flavor::standard, 1, 1) == 0.5);
  CHECK(site_shape(p, Flavor::standard, 2, 1) == 2.0);
  CHECK(site_shape(p, Flavor::stationary, 2, 1) == 1.5);
  CHECK(site_shape(p, Flavor::stationary, 1, 1) == 0.5);
  CHECK(site_shape(p, Flavor::stationary, 1, 1, true) == 1.5);
  CHECK(site_shape(p, Flavor::stationary, 3, 2) == 2.0);
  CHECK(site_shape(p, Flavor::alpha_zero_diagonal, 2, 2) == 1.0);
  // KS of -log W at three site classes over 1e5 environments (n=2)
  const int N = 100000;
  std::vector<double> d, o, s;
  double mean21 = 0;
  for (int e = 0; e < N; ++e) {
    const Environment env = generate_environment(p, 2, Flavor::standard, 3, e);
    d.push_back(-env.log_w(2, 2));
    o.push_back(-env.log_w(2, 1));
    mean21 += env.log_w(2, 1);
    const Environment st = generate_environment(p, 2, Flavor::stationary, 3, e);
    s.push_back(-st.log_w(3, 1));
  }
  CHECK(std::fabs(mean21 / N + digamma(2.0)) < 0.02);
  // critical value at 0.001 is about 1.95/sqrt(n)
  const double crit = 1.95 / std::sqrt((double)N);
  CHECK(ks_stat(d, [](double x) { return oracle::log_gamma_cdf(0.5, x); }) < crit);
  CHECK(ks_stat(o, [](double x) { return oracle::log_gamma_cdf(2.0, x); }) < crit);
  CHECK(ks_stat(s, [](double x) { return oracle::log_gamma_cdf(1.5, x); }) < crit);
}

TEST_CASE("environment generation") {
  const ModelParams p{1.0, -0.5};
  const Environment e1 = generate_environment(p, 1, Flavor::standard, 9, 0);
  CHECK(e1.n() == 1);
  CHECK(e1.contains(1, 1));
  CHECK_FALSE(e1.contains(2, 1));
  CHECK(e1.w(1, 1) > 0);
  const Environment a = generate_environment(p, 6, Flavor::standard, 9, 4);
  const Environment b = generate_environment(p, 6, Flavor::standard, 9, 4);
  const Environment c = generate_environment(p, 7, Flavor::standard, 9, 4);
  for (int i = 1; i <= 11; ++i)
    for (int j = 1; j <= std::min(i, 12 - i); ++j) {
      CHECK(a.w(i, j) == b.w(i, j));
      // counters are site addressed: a larger wedge reuses the same draws
      CHECK(a.w(i, j) == c.w(i, j));
    }
  const Environment d = generate_dyadic_environment(p, 4, 9, 4);
  CHECK(d.kind() == WeightKind::dyadic);
  CHECK(d.rng_id() == "philox4x32-10/dyadic");
  for (int i = 1; i <= 7; ++i)
    for (int j = 1; j <= std::min(i, 8 - i); ++j) {
      int e = 0;
      const double f = std::frexp(d.w(i, j), &e);
      CHECK(std::ldexp(f, 53) == std::floor(std::ldexp(f, 53)));
    }
  CHECK_THROWS_AS(generate_environment(p, 0, Flavor::standard, 1, 1), DomainError);
}

TEST_CASE("symmetrized view") {
  const Environment e = generate_environment({1.0, -0.5}, 4, Flavor::standard, 1, 2);
  const SymmetrizedEnvironment s = symmetrize(e);
  CHECK(s.w(1, 1) == e.w(1, 1) / 2);
  CHECK(s.w(1, 2) == e.w(2, 1));
  CHECK(s.w(2, 1) == e.w(2, 1));
  CHECK(s.w(3, 5) == e.w(5, 3));
  // a path and its reflection have equal weight
  const std::vector<Site> path = {{1, 1}, {2, 1}, {2, 2}, {3, 2}, {3, 3}, {4, 3}};
  double a = 1, b = 1;
  for (auto st : path) {
    a *= s.w(st.i, st.j);
    b *= s.w(st.j, st.i);
  }
  CHECK(a == b);
}

TEST_CASE("HSLG-ENV roundtrip and errors") {
  const Environment e = generate_environment({1.25, -0.3}, 3, Flavor::stationary, 77, 5);
  std::stringstream ss;
  write_environment(e, ss);
  const std::string text = ss.str();
  const Environment r = read_environment(ss);
  CHECK(r.n() == 3);
  CHECK(r.flavor() == Flavor::stationary);
  CHECK(r.seed() == 77);
  CHECK(r.stream() == 5);
  CHECK(r.params().theta == 1.25);
  CHECK(r.params().alpha == -0.3);
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= std::min(i, 6 - i); ++j) CHECK(r.w(i, j) == e.w(i, j));

  auto expect_error = [](std::string t, const std::string& needle) {
    std::istringstream is(t);
    try {
      read_environment(is);
      FAIL("no error");
    } catch (const ParseError& err) {
      const std::string msg = err.what();
      CAPTURE(msg);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };
  std::string bad = text;
  bad.replace(bad.find("theta=1.25"), 10, "theta=-1");
  expect_error(bad, "theta must be positive");
  bad = text;
  bad.replace(bad.find("version=1"), 9, "version=2");
  expect_error(bad, "version");
  // drop one site line
  bad = text;
  const auto pos = bad.find("2 1 ");
  bad.erase(pos, bad.find('\n', pos) - pos + 1);
  expect_error(bad, "expected 9 sites");
  bad = text;
  bad.erase(bad.find("end"));
  expect_error(bad, "terminator");
  bad = text;
  const auto p3 = bad.find("3 1 ");
  bad.replace(p3, bad.find('\n', p3) - p3, "3 1 inf");
  expect_error(bad, "non-finite");
  expect_error("format=HSLG\n", "HSLG-ENV");
}
