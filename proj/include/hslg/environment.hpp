#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hslg/dyadic.hpp"
#include "hslg/special_fn.hpp"

namespace hslg {

enum class Flavor { standard, stationary, alpha_zero_diagonal };
enum class WeightKind { inverse_gamma, dyadic };

std::string to_string(Flavor f);
Flavor flavor_from_string(const std::string& s);  // throws DomainError

struct EnvOptions {
  WeightKind kind = WeightKind::inverse_gamma;
  // stationary flavor only: also give (1,1) the first-row law Gamma^-1(theta-alpha)
  bool stationary_corner_row = false;
};

// Weight field on the wedge {1 <= j <= i, i+j <= 2n}. Immutable once built.
class Environment {
 public:
  Environment() = default;
  Environment(ModelParams params, int n, Flavor flavor, WeightKind kind, std::uint64_t seed,
              std::uint64_t stream);

  const ModelParams& params() const { return params_; }
  int n() const { return n_; }
  Flavor flavor() const { return flavor_; }
  WeightKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::string rng_id() const;

  static bool in_wedge(int n, int i, int j) { return j >= 1 && j <= i && i + j <= 2 * n; }
  bool contains(int i, int j) const { return in_wedge(n_, i, j); }
  static std::size_t site_count(int n) { return static_cast<std::size_t>(n) * n; }

  double w(int i, int j) const { return w_[idx(i, j)]; }
  double log_w(int i, int j) const { return logw_[idx(i, j)]; }
  // checked accessor
  double at(int i, int j) const;
  void set(int i, int j, double w);

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * (n_ + 1) + j; }

  ModelParams params_;
  int n_ = 0;
  Flavor flavor_ = Flavor::standard;
  WeightKind kind_ = WeightKind::inverse_gamma;
  std::uint64_t seed_ = 0, stream_ = 0;
  std::vector<double> w_, logw_;
};

// shape parameter of the inverse-gamma law at site (i,j)
double site_shape(const ModelParams& p, Flavor f, int i, int j, bool corner_row = false);

Environment generate_environment(const ModelParams& params, int n, Flavor flavor,
                                 std::uint64_t seed, std::uint64_t stream,
                                 const EnvOptions& opts = {});

Environment generate_dyadic_environment(const ModelParams& params, int n, std::uint64_t seed,
                                        std::uint64_t stream, Flavor flavor = Flavor::standard);

// HSLG-ENV v1
void write_environment(const Environment& env, std::ostream& os);
void write_environment(const Environment& env, const std::string& path);
Environment read_environment(std::istream& is);
Environment read_environment(const std::string& path);

// full-quadrant view with halved diagonal; holds a pointer, env must outlive it
class SymmetrizedEnvironment {
 public:
  explicit SymmetrizedEnvironment(const Environment& env) : env_(&env) {}

  const Environment& base() const { return *env_; }
  int n() const { return env_->n(); }
  bool contains(int i, int j) const { return i >= 1 && j >= 1 && i + j <= 2 * env_->n(); }

  double w(int i, int j) const {
    if (i == j) return 0.5 * env_->w(i, i);
    return i > j ? env_->w(i, j) : env_->w(j, i);
  }
  double log_w(int i, int j) const {
    if (i == j) return env_->log_w(i, i) - 0.6931471805599453;
    return i > j ? env_->log_w(i, j) : env_->log_w(j, i);
  }
  Dyadic exact_w(int i, int j) const;

 private:
  const Environment* env_;
};

SymmetrizedEnvironment symmetrize(const Environment& env);

}  // namespace hslg
