#pragma once

// Portable deterministic randomness. Everything here is part of the on-disk
// reproducibility contract: changing a constant changes every signature.
//
//   generator : xoshiro256** 1.0, state filled by four splitmix64 outputs of the seed
//   bounded   : Lemire's multiply-shift with rejection (exactly uniform on [0, n))
//   derive    : splitmix64_mix(parent ^ splitmix64_mix(child + 0x9E3779B97F4A7C15))

#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include "cminhash/core.hpp"

namespace cminhash {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Child seed for stream `child` of `parent`; distinct children give unrelated streams.
constexpr seed_t derive_seed(seed_t parent, std::uint64_t child) noexcept {
  return splitmix64_mix(parent ^ splitmix64_mix(child + 0x9E3779B97F4A7C15ULL));
}

constexpr seed_t derive_seed(seed_t parent, std::uint64_t c1, std::uint64_t c2) noexcept {
  return derive_seed(derive_seed(parent, c1), c2);
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(seed_t seed) noexcept {
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += 0x9E3779B97F4A7C15ULL;
      s = splitmix64_mix(z);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t bounded(std::uint64_t n) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

/// In-place Fisher-Yates, walking i = n-1 down to 1 and swapping with bounded(i+1).
template <typename T>
void fisher_yates(std::span<T> items, Xoshiro256& rng) noexcept {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace cminhash
