#pragma once

#include <cstdint>
#include <limits>

#include "sgdinf/normal.hpp"

namespace sgdinf {

/// Identifies one random stream. Distinct (master_seed, stream_index) pairs
/// give independent streams; equal pairs give bit-identical streams.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Sub-stream `index` of this stream (e.g. one per replication or path).
  SeedSpec child(std::uint64_t index) const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// xoshiro256++ seeded from a SeedSpec through splitmix64.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(SeedSpec seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by inversion of the uniform draw.
  double normal() noexcept { return normal_quantile(uniform()); }

  /// Standard logistic by inversion.
  double logistic() noexcept;

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace sgdinf
