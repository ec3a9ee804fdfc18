#include "hslg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "hslg/environment.hpp"
#include "hslg/errors.hpp"
#include "hslg/experiments.hpp"
#include "hslg/multilayer.hpp"
#include "hslg/polymer.hpp"
#include "hslg/umap.hpp"

namespace hslg {

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "theta", "alpha", "n",      "flavor", "samples", "seed",         "threads",   "out",       "precision",
      "envs",  "sizes", "k",      "m",      "x",       "walk_samples", "resamples", "stream"};
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::map<std::string, ConfigEntry> parse_config_text(const std::string& text) {
  std::map<std::string, ConfigEntry> out;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, s, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string val = trim(s.substr(eq + 1));
    const auto& ks = config_keys();
    if (std::find(ks.begin(), ks.end(), key) == ks.end()) throw ParseError(line, key, "unknown key");
    if (val.empty()) throw ParseError(line, key, "missing value");
    if (out.count(key)) throw ParseError(line, key, "duplicate key");
    out[key] = {val, line};
  }
  return out;
}

std::map<std::string, ConfigEntry> parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// flag > config file > fallback
class Resolver {
 public:
  Resolver(CLI::App& app, std::map<std::string, ConfigEntry> cfg) : app_(app), cfg_(std::move(cfg)) {}

  bool has(const std::string& key) const { return flag_set(key) || cfg_.count(key); }

  std::string str(const std::string& key, const std::string& fallback) const {
    if (flag_set(key)) return app_.get_option(flag_name(key))->as<std::string>();
    if (auto it = cfg_.find(key); it != cfg_.end()) return it->second.value;
    return fallback;
  }

  double num(const std::string& key, double fallback) const {
    if (flag_set(key)) return app_.get_option(flag_name(key))->as<double>();
    if (auto it = cfg_.find(key); it != cfg_.end()) return parse_double(it->second, key);
    return fallback;
  }

  long long integer(const std::string& key, long long fallback) const {
    if (flag_set(key)) return app_.get_option(flag_name(key))->as<long long>();
    if (auto it = cfg_.find(key); it != cfg_.end()) return parse_int(it->second, key);
    return fallback;
  }

  std::vector<int> list(const std::string& key, const std::vector<int>& fallback) const {
    std::string s;
    int line = 0;
    if (flag_set(key)) {
      s = app_.get_option(flag_name(key))->as<std::string>();
    } else if (auto it = cfg_.find(key); it != cfg_.end()) {
      s = it->second.value;
      line = it->second.line;
    } else {
      return fallback;
    }
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(static_cast<int>(parse_int({trim(tok), line}, key)));
    if (out.empty()) fail(line, key, "empty list");
    return out;
  }

 private:
  static std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return "--" + key;
  }
  bool flag_set(const std::string& key) const {
    try {
      return app_.get_option(flag_name(key))->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  }
  [[noreturn]] static void fail(int line, const std::string& key, const std::string& msg) {
    if (line > 0) throw ParseError(line, key, msg);
    throw UsageError("--" + key + ": " + msg);
  }
  static double parse_double(const ConfigEntry& e, const std::string& key) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos == e.value.size()) return v;
    } catch (const std::exception&) {
    }
    fail(e.line, key, "expected a number, got '" + e.value + "'");
  }
  static long long parse_int(const ConfigEntry& e, const std::string& key) {
    long long v = 0;
    const char* b = e.value.data();
    const auto r = std::from_chars(b, b + e.value.size(), v);
    if (r.ec != std::errc() || r.ptr != b + e.value.size()) {
      fail(e.line, key, "expected an integer, got '" + e.value + "'");
    }
    return v;
  }

  CLI::App& app_;
  std::map<std::string, ConfigEntry> cfg_;
};

std::uint64_t resolve_seed(const Resolver& r) {
  if (r.has("seed")) return static_cast<std::uint64_t>(r.integer("seed", 1));
  if (const char* s = std::getenv("HSLG_LAB_SEED")) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s, s + std::strlen(s), v);
    if (res.ec != std::errc() || *res.ptr != '\0') throw UsageError("HSLG_LAB_SEED must be an unsigned integer");
    return v;
  }
  return 1;
}

ModelParams resolve_params(const Resolver& r) {
  ModelParams p{r.num("theta", 1.0), r.num("alpha", -0.5)};
  p.validate();
  return p;
}

Precision resolve_precision(const Resolver& r) {
  const std::string s = r.str("precision", "float");
  if (s == "float") return Precision::log_float;
  if (s == "exact") return Precision::exact;
  throw UsageError("--precision must be float or exact");
}

int require_positive(const Resolver& r, const std::string& key, long long fallback) {
  const long long v = r.integer(key, fallback);
  if (v <= 0 || v > 1'000'000'000) throw UsageError("--" + key + " must be a positive integer");
  return static_cast<int>(v);
}

std::string require_out(const Resolver& r) {
  if (!r.has("out")) throw UsageError("missing required flag --out");
  return r.str("out", "");
}

// ---- env ----

int cmd_env_gen(const Resolver& r, std::ostream& out) {
  const ModelParams p = resolve_params(r);
  const int n = require_positive(r, "n", 8);
  const Flavor f = flavor_from_string(r.str("flavor", "standard"));
  const std::uint64_t seed = resolve_seed(r);
  const std::uint64_t stream = static_cast<std::uint64_t>(r.integer("stream", 0));
  const std::string path = require_out(r);
  const Environment env = resolve_precision(r) == Precision::exact
                              ? generate_dyadic_environment(p, n, seed, stream, f)
                              : generate_environment(p, n, f, seed, stream);
  write_environment(env, path);
  out << "wrote " << path << " (n=" << n << ", " << env.rng_id() << ")\n";
  return 0;
}

int cmd_env_check(const std::string& file, std::ostream& out, std::ostream& err) {
  try {
    const Environment env = read_environment(file);
    out << "ok " << file << ": n=" << env.n() << " flavor=" << to_string(env.flavor()) << " sites=" << Environment::site_count(env.n())
        << "\n";
    return 0;
  } catch (const ParseError& e) {
    err << "invalid environment " << file << ": " << e.what() << "\n";
    return 1;
  }
}

// ---- simulate ----

Environment sim_env(const Resolver& r, int n, int e) {
  const ModelParams p = resolve_params(r);
  const Flavor f = flavor_from_string(r.str("flavor", "standard"));
  const std::uint64_t seed = resolve_seed(r);
  if (resolve_precision(r) == Precision::exact) return generate_dyadic_environment(p, n, seed, env_stream(n, e), f);
  return generate_environment(p, n, f, seed, env_stream(n, e));
}

std::ostream& sink(const Resolver& r, std::ofstream& file, std::ostream& out) {
  if (!r.has("out")) return out;
  const std::string path = r.str("out", "");
  file.open(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  return file;
}

int cmd_sim_endpoint(const Resolver& r, std::ostream& out) {
  const int n = require_positive(r, "n", 32);
  const int envs = require_positive(r, "envs", r.integer("samples", 1));
  std::ofstream f;
  std::ostream& os = sink(r, f, out);
  os << "env,r,prob\n";
  for (int e = 0; e < envs; ++e) {
    const Environment env = sim_env(r, n, e);
    const EndpointPMF pmf = endpoint_pmf(partition_table(env, resolve_precision(r)));
    for (std::size_t k = 0; k < pmf.probs.size(); ++k) os << e << "," << k << "," << format_number(pmf.probs[k]) << "\n";
  }
  return 0;
}

int cmd_sim_path(const Resolver& r, std::ostream& out) {
  const int n = require_positive(r, "n", 32);
  const int samples = require_positive(r, "samples", 1);
  const Environment env = sim_env(r, n, 0);
  const LogPartitionTable t = partition_table(env);
  RngStream rng(resolve_seed(r), 0, counter_tag::kPath);
  std::ofstream f;
  std::ostream& os = sink(r, f, out);
  os << "sample,step,i,j\n";
  for (int s = 0; s < samples; ++s) {
    const PolymerPath p = sample_path(t, env, rng);
    for (std::size_t k = 0; k < p.sites.size(); ++k)
      os << s << "," << k << "," << p.sites[k].i << "," << p.sites[k].j << "\n";
  }
  return 0;
}

int cmd_sim_ensemble(const Resolver& r, std::ostream& out) {
  const int N = require_positive(r, "n", 16);
  const int kmax = require_positive(r, "k", 2);
  const Environment env = sim_env(r, N + 1, 0);
  const LineEnsemble le = line_ensemble(symmetrize(env), N, kmax, resolve_precision(r));
  std::ofstream f;
  std::ostream& os = sink(r, f, out);
  os << "k,p,H\n";
  for (int k = 1; k <= kmax; ++k)
    for (int p = 1; p <= le.length(k); ++p) os << k << "," << p << "," << format_number(le.H(k, p)) << "\n";
  return 0;
}

// ---- verify ----

int report(std::ostream& out, std::ostream& err, const std::string& what, long checks, const std::string& failure) {
  if (failure.empty()) {
    out << "PASS " << what << ": " << checks << " exact checks\n";
    return 0;
  }
  out << "FAIL " << what << "\n";
  err << "first failing invariant: " << failure << "\n";
  return 1;
}

int cmd_verify_identity(const Resolver& r, std::ostream& out, std::ostream& err) {
  const ModelParams p = resolve_params(r);
  const int n = require_positive(r, "n", 5);
  const int envs = require_positive(r, "envs", 50);
  const std::uint64_t seed = resolve_seed(r);
  long checks = 0;
  for (int e = 0; e < envs; ++e) {
    const Environment env = generate_dyadic_environment(p, n, seed, static_cast<std::uint64_t>(e));
    const LogPartitionTable t = partition_table(env, Precision::exact);
    const SymPathTable st(symmetrize(env), 1, true);
    for (int i = 1; i <= 2 * n - 1; ++i)
      for (int j = 1; j <= std::min(i, 2 * n - i); ++j) {
        ++checks;
        if (!(st.exact_z(i, j) * Dyadic(2) == t.exact_z(i, j))) {
          std::ostringstream os;
          os << "2*Z_sym(" << i << "," << j << ") != Z(" << i << "," << j << ") in env seed=" << seed << " stream=" << e;
          return report(out, err, "identity", checks, os.str());
        }
      }
  }
  return report(out, err, "identity 2*Z_sym = Z", checks, "");
}

int cmd_verify_lgv(const Resolver& r, std::ostream& out, std::ostream& err) {
  const ModelParams p = resolve_params(r);
  const int n = require_positive(r, "n", 5);
  const int envs = require_positive(r, "envs", 25);
  const int rmax = require_positive(r, "k", 3);
  const std::uint64_t seed = resolve_seed(r);
  long checks = 0;
  for (int e = 0; e < envs; ++e) {
    const Environment env = generate_dyadic_environment(p, n, seed, static_cast<std::uint64_t>(e));
    const auto s = symmetrize(env);
    for (int q = 1; q <= rmax; ++q)
      for (int m = 1; m <= 2 * n - 1; ++m)
        for (int k = q; k <= std::min(m, 2 * n - m); ++k) {
          ++checks;
          const auto bf = zsym_multi_bruteforce(s, m, k, q);
          const auto lg = zsym_multi_lgv(s, m, k, q, Precision::exact);
          if (!(*bf.exact == *lg.exact)) {
            std::ostringstream os;
            os << "det != enumeration at (m,n,r)=(" << m << "," << k << "," << q << ") env stream=" << e;
            return report(out, err, "lgv", checks, os.str());
          }
        }
  }
  return report(out, err, "lgv determinant = enumeration", checks, "");
}

int cmd_verify_umap(const Resolver& r, std::ostream& out, std::ostream& err) {
  const ModelParams p = resolve_params(r);
  const std::uint64_t seed = resolve_seed(r);
  const int mmax = require_positive(r, "m", 4);
  const int nmax = require_positive(r, "n", 4);
  if (mmax > 6 || nmax > 6) throw UsageError("--m and --n are capped at 6 for exhaustive checks");
  const Environment env = generate_dyadic_environment(p, std::max(mmax, nmax) + 1, seed, 0);
  const auto s = symmetrize(env);
  long checks = 0;
  for (int x : {1, 2})
    for (int m = 2; m <= mmax; ++m)
      for (int n = 2; n <= std::min(m, nmax); ++n) {
        const UmapCheck c = verify_umap_domain(x, m, n, s);
        checks += static_cast<long>(c.pairs);
        if (c.violations) {
          std::ostringstream os;
          os << "x=" << x << " (m,n)=(" << m << "," << n << "): " << c.first_failure;
          return report(out, err, "umap", checks, os.str());
        }
      }
  return report(out, err, "umap properties", checks, "");
}

int cmd_verify_sbd(const Resolver& r, std::ostream& out, std::ostream& err) {
  const ModelParams p = resolve_params(r);
  const std::uint64_t seed = resolve_seed(r);
  const int envs = require_positive(r, "envs", 100);
  const int k = require_positive(r, "k", 1);
  const int m = require_positive(r, "m", 2 * k + 2);
  const int n = require_positive(r, "n", 2 * k + 1);
  long checks = 0;
  for (int e = 0; e < envs; ++e) {
    const Environment env = generate_dyadic_environment(p, std::max(m, n) + 1, seed, static_cast<std::uint64_t>(e));
    const SbdReport rep = check_sbd_inequality(symmetrize(env), m, n, k);
    ++checks;
    if (!rep.holds) {
      std::ostringstream os;
      os << "inequality fails at (m,n,k)=(" << m << "," << n << "," << k << ") env stream=" << e << " lhs=" << rep.lhs
         << " rhs=" << rep.rhs;
      return report(out, err, "sbd", checks, os.str());
    }
  }
  return report(out, err, "sbd inequality", checks, "");
}

// ---- experiment ----

int cmd_experiment(const std::string& name, const Resolver& r, std::ostream& out, std::ostream& err) {
  ExperimentConfig c = default_config(name);
  c.params = resolve_params(r);
  c.flavor = flavor_from_string(r.str("flavor", to_string(c.flavor)));
  if (r.has("n")) c.sizes = {require_positive(r, "n", 1)};
  c.sizes = r.list("sizes", c.sizes);
  c.samples = require_positive(r, "envs", r.integer("samples", c.samples));
  c.seed = resolve_seed(r);
  c.threads = require_positive(r, "threads", 1);
  c.walk_samples = require_positive(r, "walk_samples", c.walk_samples);
  c.resamples = require_positive(r, "resamples", c.resamples);
  const std::string path = require_out(r);
  try {
    c.validate();
    if (!c.params.bound_phase()) throw DomainError("bound phase requires alpha < 0");
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  StatReport rep;
  try {
    rep = run_experiment(name, c);
  } catch (const DomainError& e) {
    throw std::runtime_error(e.what());
  }
  write_csv(rep, path);
  write_meta(rep, c, path + ".meta");
  std::string jpath = path;
  if (jpath.size() > 4 && jpath.substr(jpath.size() - 4) == ".csv") jpath.resize(jpath.size() - 4);
  write_json(rep, jpath + ".json");
  for (const auto& cr : rep.criteria) out << (cr.pass ? "PASS " : "FAIL ") << cr.name << (cr.detail.empty() ? "" : "  ") << cr.detail << "\n";
  if (const Criterion* f = rep.first_failure()) {
    err << "first failing invariant: " << f->name << " (" << f->detail << ") config " << config_to_json(c).dump() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hslg_lab: half-space log-gamma polymer lab"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  double theta = 1.0, alpha = -0.5;
  int n = 0, samples = 0, threads = 1, envs = 0, k = 0, m = 0, walk_samples = 0, resamples = 0;
  long long seed = 0, stream = 0;
  std::string flavor, outp, config, precision, sizes;
  app.add_option("--theta", theta, "theta > 0 (default 1)");
  app.add_option("--alpha", alpha, "alpha in (-theta, theta); bound phase is alpha < 0 (default -0.5)");
  app.add_option("--n", n, "system size N (experiments: a single size)");
  app.add_option("--flavor", flavor, "standard | stationary | alpha-zero-diagonal");
  app.add_option("--samples", samples, "samples (environments for experiments)");
  app.add_option("--envs", envs, "number of environments");
  app.add_option("--seed", seed, "master seed (fallback: HSLG_LAB_SEED, then 1)");
  app.add_option("--stream", stream, "stream index for env gen (default 0)");
  app.add_option("--threads", threads, "worker threads; never changes numeric output");
  app.add_option("--out", outp, "output path");
  app.add_option("--config", config, "flat key = value file; flags override it");
  app.add_option("--precision", precision, "float | exact");
  app.add_option("--sizes", sizes, "comma separated size grid for experiments");
  app.add_option("--k", k, "curves / layers / k parameter");
  app.add_option("--m", m, "first coordinate bound for verify umap|sbd");
  app.add_option("--walk-samples", walk_samples, "log-gamma walk samples");
  app.add_option("--resamples", resamples, "bootstrap resamples (default 1000)");

  auto* env = app.add_subcommand("env", "environment files")->require_subcommand(1)->fallthrough();
  auto* env_gen = env->add_subcommand("gen", "generate an environment file")->fallthrough();
  std::string check_file;
  auto* env_check = env->add_subcommand("check", "validate an environment file")->fallthrough();
  env_check->add_option("file", check_file, "HSLG-ENV file")->required();

  auto* sim = app.add_subcommand("simulate", "polymer simulation output")->require_subcommand(1)->fallthrough();
  auto* s_end = sim->add_subcommand("endpoint", "quenched endpoint pmf per environment")->fallthrough();
  auto* s_path = sim->add_subcommand("path", "sample polymer paths")->fallthrough();
  auto* s_ens = sim->add_subcommand("ensemble", "line ensemble curves")->fallthrough();

  auto* ver = app.add_subcommand("verify", "exact checks")->require_subcommand(1)->fallthrough();
  auto* v_umap = ver->add_subcommand("umap", "exhaustive pair-map properties")->fallthrough();
  auto* v_lgv = ver->add_subcommand("lgv", "determinant vs enumeration")->fallthrough();
  auto* v_id = ver->add_subcommand("identity", "2 Z_sym = Z")->fallthrough();
  auto* v_sbd = ver->add_subcommand("sbd", "diagonal-splitting inequality")->fallthrough();

  auto* ex = app.add_subcommand("experiment", "statistical experiments")->require_subcommand(1)->fallthrough();
  std::vector<std::pair<std::string, CLI::App*>> exps;
  for (const char* name : {"pinning", "walk", "quenched", "fluct", "lln"})
    exps.emplace_back(name, ex->add_subcommand(name, std::string("run the ") + name + " experiment")->fallthrough());

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    std::map<std::string, ConfigEntry> cfg;
    if (!config.empty()) cfg = parse_config_file(config);
    Resolver r(app, cfg);
    if (env_gen->parsed()) return cmd_env_gen(r, out);
    if (env_check->parsed()) return cmd_env_check(check_file, out, err);
    if (s_end->parsed()) return cmd_sim_endpoint(r, out);
    if (s_path->parsed()) return cmd_sim_path(r, out);
    if (s_ens->parsed()) return cmd_sim_ensemble(r, out);
    if (v_umap->parsed()) return cmd_verify_umap(r, out, err);
    if (v_lgv->parsed()) return cmd_verify_lgv(r, out, err);
    if (v_id->parsed()) return cmd_verify_identity(r, out, err);
    if (v_sbd->parsed()) return cmd_verify_sbd(r, out, err);
    for (auto& [name, sub] : exps)
      if (sub->parsed()) return cmd_experiment(name, r, out, err);
    err << "usage error: no command\n" << app.help();
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hslg
