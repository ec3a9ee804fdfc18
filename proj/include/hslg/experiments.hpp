#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hslg/environment.hpp"
#include "hslg/rng.hpp"
#include "hslg/special_fn.hpp"

namespace hslg {

struct ExperimentConfig {
  ModelParams params;
  Flavor flavor = Flavor::standard;
  std::vector<int> sizes;
  int samples = 0;  // environments per size
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<int> k_grid{0, 1, 2, 5, 10, 20};
  int trend_k = 10;
  double deep_M = 1.0;
  int walk_samples = 100000;
  int rmax = 5;  // increments / pmf entries examined
  double significance = 0.001;
  int resamples = 1000;
  double ci_level = 0.99;

  void validate() const;
};

// defaults for pinning|walk|quenched|fluct|lln
ExperimentConfig default_config(const std::string& experiment);

struct Criterion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct StatReport {
  std::string experiment;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<Criterion> criteria;
  nlohmann::json details = nlohmann::json::object();
  double wall_seconds = 0.0;

  bool pass() const;
  const Criterion* first_failure() const;
};

// work items are run on a pool, results come back in index order
template <class T>
std::vector<T> parallel_map(int count, int threads, const std::function<T(int)>& fn) {
  std::vector<T> out(count);
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int k = 0; k < count; ++k) out[k] = fn(k);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int k; (k = next.fetch_add(1)) < count;) {
        try {
          out[k] = fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> g(m);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

// stream index of environment e at size N
std::uint64_t env_stream(int N, int e);

struct TrendResult {
  std::vector<double> points, lo, hi;
  bool ordered = false;
  bool contradicted = false;
  bool pass() const { return ordered && !contradicted; }
};

// statistic expected to go down along the groups; strict or not
TrendResult trend_decreasing(const std::vector<std::vector<double>>& groups,
                             const std::function<double(const std::vector<double>&)>& stat,
                             bool strict, int resamples, double level, RngStream& rng);

StatReport run_pinning(const ExperimentConfig& c);
StatReport run_walk_attractor(const ExperimentConfig& c);
StatReport run_quenched_limit(const ExperimentConfig& c);
StatReport run_gaussian_fluct(const ExperimentConfig& c);
StatReport run_lln_profile(const ExperimentConfig& c);

StatReport run_experiment(const std::string& name, const ExperimentConfig& c);

std::string format_number(double v);
void write_csv(const StatReport& r, const std::string& path);
void write_json(const StatReport& r, const std::string& path);
// key = value lines: config, seeds, version
void write_meta(const StatReport& r, const ExperimentConfig& c, const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

std::string version_string();

}  // namespace hslg
