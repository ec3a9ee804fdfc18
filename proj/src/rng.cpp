#include "hslg/rng.hpp"

#include <cmath>
#include <numbers>

#include "hslg/errors.hpp"

namespace hslg {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32Ctr philox4x32_10(Philox4x32Ctr c, Philox4x32Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter_hi,
                     std::uint64_t counter_lo)
    : seed_(seed), stream_(stream), hi_(counter_hi), lo_(counter_lo) {
  const std::uint64_t k = seed ^ mix64(stream);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

void RngStream::refill() {
  const Philox4x32Ctr ctr = {static_cast<std::uint32_t>(lo_), static_cast<std::uint32_t>(lo_ >> 32),
                             static_cast<std::uint32_t>(hi_), static_cast<std::uint32_t>(hi_ >> 32)};
  const auto out = philox4x32_10(ctr, key_);
  ++lo_;
  buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  avail_ = 2;
}

std::uint64_t RngStream::next_u64() {
  if (avail_ == 0) refill();
  return buf_[2 - avail_--];
}

double RngStream::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

namespace {

// Marsaglia-Tsang, beta >= 1; returns log of the sample
double log_gamma_mt(double beta, RngStream& rng) {
  const double d = beta - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

}  // namespace

double sample_log_gamma(double beta, RngStream& rng) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("gamma shape must be positive");
  if (beta >= 1.0) return log_gamma_mt(beta, rng);
  // G(beta) = G(beta+1) * U^{1/beta}
  const double lg = log_gamma_mt(beta + 1.0, rng);
  return lg + std::log(rng.uniform()) / beta;
}

double sample_gamma(double beta, RngStream& rng) { return std::exp(sample_log_gamma(beta, rng)); }

double sample_inverse_gamma(double beta, RngStream& rng) {
  return std::exp(-sample_log_gamma(beta, rng));
}

}  // namespace hslg
