#include "sgdinf/rng.hpp"

#include <cmath>

namespace sgdinf {

namespace {
constexpr std::uint64_t kStreamMul = 0xD1B54A32D192ED03ULL;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SeedSpec SeedSpec::child(std::uint64_t index) const noexcept {
  std::uint64_t st = master_seed;
  std::uint64_t mixed = splitmix64(st) ^ (stream_index * kStreamMul);
  return SeedSpec{splitmix64(mixed), index};
}

Rng::Rng(SeedSpec seed) noexcept {
  std::uint64_t st = seed.master_seed;
  std::uint64_t state = splitmix64(st) ^ (seed.stream_index * kStreamMul);
  for (auto& word : s_) word = splitmix64(state);
}

double Rng::logistic() noexcept {
  const double u = uniform();
  return std::log(u / (1.0 - u));
}

}  // namespace sgdinf
