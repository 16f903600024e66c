#pragma once

#include <cstdint>
#include <random>

namespace mecsim {

// SplitMix64 round: mixes a seed into a well-distributed 64-bit value.
std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from a base seed, a stream id and an index.
// Distinct (stream, index) pairs never collide in practice, which keeps training
// and evaluation randomness disjoint.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

namespace stream {
inline constexpr std::uint64_t env_train = 1;
inline constexpr std::uint64_t env_eval = 2;
inline constexpr std::uint64_t agent = 3;
inline constexpr std::uint64_t rollout = 4;
inline constexpr std::uint64_t check = 5;
}  // namespace stream

// Seedable generator with the handful of draws the simulator needs.
// All distributions are implemented on top of raw 64-bit draws so a fixed seed
// gives a fixed sequence regardless of standard-library internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform on {0, ..., n-1}, rejection sampled so every value is equally likely.
  int uniform_int(int n);

  // Standard normal via Box-Muller (no cached spare).
  double gaussian();

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 gen_;
};

}  // namespace mecsim
