#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace hslg {

inline constexpr std::string_view kRngAlgorithm = "philox4x32-10";

using Philox4x32Ctr = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

Philox4x32Ctr philox4x32_10(Philox4x32Ctr ctr, Philox4x32Key key);

// bijective 64-bit finalizer (splitmix64)
std::uint64_t mix64(std::uint64_t x);

// Counter-based stream. Output is a pure function of
// (seed, stream, counter_hi, counter_lo). counter_lo advances per block.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter_hi = 0,
            std::uint64_t counter_lo = 0);

  std::uint64_t next_u64();
  // uniform on the open interval (0,1)
  double uniform();
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter_hi() const { return hi_; }
  std::uint64_t counter_lo() const { return lo_; }

 private:
  void refill();

  std::uint64_t seed_, stream_, hi_, lo_;
  Philox4x32Key key_;
  std::uint64_t buf_[2] = {0, 0};
  int avail_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// log of a Gamma(beta, 1) sample; stable for tiny beta
double sample_log_gamma(double beta, RngStream& rng);
double sample_gamma(double beta, RngStream& rng);
double sample_inverse_gamma(double beta, RngStream& rng);

// purpose tags folded into counter_hi so unrelated draws never share counters
namespace counter_tag {
inline constexpr std::uint64_t kSite = 0;
inline constexpr std::uint64_t kPath = 1ull << 62;
inline constexpr std::uint64_t kWalk = 2ull << 62;
inline constexpr std::uint64_t kMisc = 3ull << 62;
}  // namespace counter_tag

}  // namespace hslg
