#include "hslg/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hslg/errors.hpp"
#include "hslg/rng.hpp"

namespace hslg {

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::standard: return "standard";
    case Flavor::stationary: return "stationary";
    case Flavor::alpha_zero_diagonal: return "alpha-zero-diagonal";
  }
  return "standard";
}

Flavor flavor_from_string(const std::string& s) {
  if (s == "standard") return Flavor::standard;
  if (s == "stationary") return Flavor::stationary;
  if (s == "alpha-zero-diagonal") return Flavor::alpha_zero_diagonal;
  throw DomainError("unknown flavor '" + s + "'");
}

namespace {
constexpr const char* kDyadicSuffix = "/dyadic";
}

Environment::Environment(ModelParams params, int n, Flavor flavor, WeightKind kind,
                         std::uint64_t seed, std::uint64_t stream)
    : params_(params), n_(n), flavor_(flavor), kind_(kind), seed_(seed), stream_(stream) {
  params_.validate();
  if (n < 1) throw DomainError("n must be >= 1");
  const std::size_t sz = static_cast<std::size_t>(2 * n + 1) * (n + 1);
  w_.assign(sz, 0.0);
  logw_.assign(sz, 0.0);
}

std::string Environment::rng_id() const {
  std::string id(kRngAlgorithm);
  if (kind_ == WeightKind::dyadic) id += kDyadicSuffix;
  return id;
}

double Environment::at(int i, int j) const {
  if (!contains(i, j)) {
    throw DomainError("site (" + std::to_string(i) + "," + std::to_string(j) + ") outside wedge");
  }
  return w(i, j);
}

void Environment::set(int i, int j, double w) {
  if (!contains(i, j)) {
    throw DomainError("site (" + std::to_string(i) + "," + std::to_string(j) + ") outside wedge");
  }
  if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("weight must be positive and finite");
  w_[idx(i, j)] = w;
  logw_[idx(i, j)] = std::log(w);
}

double site_shape(const ModelParams& p, Flavor f, int i, int j, bool corner_row) {
  const bool diag = (i == j);
  switch (f) {
    case Flavor::standard: break;
    case Flavor::stationary:
      if (j == 1 && (i >= 2 || corner_row)) return p.theta - p.alpha;
      break;
    case Flavor::alpha_zero_diagonal:
      if (diag) return p.theta;
      break;
  }
  return diag ? p.alpha + p.theta : 2.0 * p.theta;
}

namespace {

Environment generate_impl(const ModelParams& params, int n, Flavor flavor, std::uint64_t seed,
                          std::uint64_t stream, const EnvOptions& opts) {
  params.validate();
  if (flavor == Flavor::stationary && !(params.alpha < params.theta)) {
    throw DomainError("stationary flavor requires theta - alpha > 0");
  }
  Environment env(params, n, flavor, opts.kind, seed, stream);
  for (int i = 1; i <= 2 * n - 1; ++i) {
    const int jmax = std::min(i, 2 * n - i);
    for (int j = 1; j <= jmax; ++j) {
      const std::uint64_t site =
          counter_tag::kSite | (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
      RngStream rng(seed, stream, site);
      const double beta = site_shape(params, flavor, i, j, opts.stationary_corner_row);
      const double logw = -sample_log_gamma(beta, rng);
      double w = std::exp(logw);
      if (opts.kind == WeightKind::dyadic) {
        // keep the binade of the model draw, replace the significand with 52 random bits
        int e = 0;
        std::frexp(w, &e);
        const std::uint64_t k = rng.next_u64() >> 12;
        w = std::ldexp(static_cast<double>((1ull << 52) | k), e - 53);
      }
      if (!(w > 0.0) || !std::isfinite(w)) {
        // underflow/overflow of an extreme draw: clamp into range
        w = std::clamp(std::isfinite(w) ? w : 1e300, 1e-300, 1e300);
      }
      env.set(i, j, w);
    }
  }
  return env;
}

}  // namespace

Environment generate_environment(const ModelParams& params, int n, Flavor flavor,
                                 std::uint64_t seed, std::uint64_t stream,
                                 const EnvOptions& opts) {
  return generate_impl(params, n, flavor, seed, stream, opts);
}

Environment generate_dyadic_environment(const ModelParams& params, int n, std::uint64_t seed,
                                        std::uint64_t stream, Flavor flavor) {
  EnvOptions o;
  o.kind = WeightKind::dyadic;
  return generate_impl(params, n, flavor, seed, stream, o);
}

// ---- HSLG-ENV v1 ----

void write_environment(const Environment& env, std::ostream& os) {
  char buf[64];
  os << "format=HSLG-ENV\n";
  os << "version=1\n";
  std::snprintf(buf, sizeof buf, "%.17g", env.params().theta);
  os << "theta=" << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", env.params().alpha);
  os << "alpha=" << buf << "\n";
  os << "n=" << env.n() << "\n";
  os << "flavor=" << to_string(env.flavor()) << "\n";
  os << "rng=" << env.rng_id() << "\n";
  os << "seed=" << env.seed() << "\n";
  os << "stream=" << env.stream() << "\n";
  const int n = env.n();
  for (int i = 1; i <= 2 * n - 1; ++i) {
    const int jmax = std::min(i, 2 * n - i);
    for (int j = 1; j <= jmax; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", env.w(i, j));
      os << i << ' ' << j << ' ' << buf << '\n';
    }
  }
  os << "end\n";
}

void write_environment(const Environment& env, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_environment(env, f);
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

namespace {

double parse_double(const std::string& s, int line, const std::string& field) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, field, "not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ParseError(line, field, "trailing characters in '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, int line, const std::string& field) {
  if (s.empty() || s[0] == '-') throw ParseError(line, field, "expected unsigned integer");
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, field, "expected unsigned integer, got '" + s + "'");
  }
  if (pos != s.size()) throw ParseError(line, field, "trailing characters in '" + s + "'");
  return v;
}

}  // namespace

Environment read_environment(std::istream& is) {
  static const char* kKeys[] = {"format", "version", "theta", "alpha", "n",
                                "flavor", "rng",     "seed",  "stream"};
  std::string line;
  int lineno = 0;
  std::string vals[9];
  for (int k = 0; k < 9; ++k) {
    if (!std::getline(is, line)) throw ParseError(lineno + 1, kKeys[k], "truncated header");
    ++lineno;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, kKeys[k], "malformed header line");
    const std::string key = line.substr(0, eq);
    if (key != kKeys[k]) {
      throw ParseError(lineno, key, std::string("expected header field '") + kKeys[k] + "'");
    }
    vals[k] = line.substr(eq + 1);
    if (k == 0 && vals[0] != "HSLG-ENV") throw ParseError(1, "format", "expected HSLG-ENV");
    if (k == 1 && vals[1] != "1") {
      throw ParseError(2, "version", "unsupported version '" + vals[1] + "'");
    }
  }
  ModelParams p;
  p.theta = parse_double(vals[2], 3, "theta");
  if (!(p.theta > 0.0) || !std::isfinite(p.theta)) {
    throw ParseError(3, "theta", "theta must be positive");
  }
  p.alpha = parse_double(vals[3], 4, "alpha");
  if (!(p.alpha > -p.theta) || !std::isfinite(p.alpha)) {
    throw ParseError(4, "alpha", "alpha must exceed -theta");
  }
  const std::uint64_t n64 = parse_u64(vals[4], 5, "n");
  if (n64 < 1 || n64 > 100000) throw ParseError(5, "n", "n must be in 1..100000");
  const int n = static_cast<int>(n64);
  Flavor flavor;
  try {
    flavor = flavor_from_string(vals[5]);
  } catch (const DomainError& e) {
    throw ParseError(6, "flavor", e.what());
  }
  WeightKind kind;
  const std::string base(kRngAlgorithm);
  if (vals[6] == base) {
    kind = WeightKind::inverse_gamma;
  } else if (vals[6] == base + kDyadicSuffix) {
    kind = WeightKind::dyadic;
  } else {
    throw ParseError(7, "rng", "unknown algorithm id '" + vals[6] + "'");
  }
  const std::uint64_t seed = parse_u64(vals[7], 8, "seed");
  const std::uint64_t stream = parse_u64(vals[8], 9, "stream");

  Environment env(p, n, flavor, kind, seed, stream);
  const std::size_t expected = Environment::site_count(n);
  std::size_t got = 0;
  for (int i = 1; i <= 2 * n - 1; ++i) {
    const int jmax = std::min(i, 2 * n - i);
    for (int j = 1; j <= jmax; ++j) {
      if (!std::getline(is, line)) {
        throw ParseError(lineno + 1, "site",
                         "truncated payload: expected " + std::to_string(expected) +
                             " sites, found " + std::to_string(got));
      }
      ++lineno;
      if (line == "end") {
        throw ParseError(lineno, "site",
                         "expected " + std::to_string(expected) + " sites, found " +
                             std::to_string(got));
      }
      std::istringstream ls(line);
      std::string si, sj, sw, extra;
      if (!(ls >> si >> sj >> sw) || (ls >> extra)) {
        throw ParseError(lineno, "site", "expected 'i j w'");
      }
      const auto ii = parse_u64(si, lineno, "i");
      const auto jj = parse_u64(sj, lineno, "j");
      if (ii != static_cast<std::uint64_t>(i) || jj != static_cast<std::uint64_t>(j)) {
        throw ParseError(lineno, "site",
                         "missing or misplaced site (" + std::to_string(i) + "," +
                             std::to_string(j) + "): expected " + std::to_string(expected) +
                             " sites in row-major order");
      }
      const double w = parse_double(sw, lineno, "w");
      if (!std::isfinite(w)) throw ParseError(lineno, "w", "non-finite weight");
      if (!(w > 0.0)) throw ParseError(lineno, "w", "weight must be positive");
      env.set(i, j, w);
      ++got;
    }
  }
  if (!std::getline(is, line)) throw ParseError(lineno + 1, "end", "missing terminator 'end'");
  ++lineno;
  if (line != "end") {
    throw ParseError(lineno, "end",
                     "expected terminator after " + std::to_string(expected) + " sites");
  }
  return env;
}

Environment read_environment(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return read_environment(f);
}

Dyadic SymmetrizedEnvironment::exact_w(int i, int j) const {
  if (i == j) return Dyadic::from_double(env_->w(i, i)) * Dyadic::pow2(-1);
  return Dyadic::from_double(i > j ? env_->w(i, j) : env_->w(j, i));
}

SymmetrizedEnvironment symmetrize(const Environment& env) { return SymmetrizedEnvironment(env); }

}  // namespace hslg
