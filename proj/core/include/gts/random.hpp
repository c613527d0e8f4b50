#pragma once

#include <cstdint>
#include <random>

namespace gts {

// Advances `state` and returns a well-mixed 64-bit word (splitmix64).
inline std::uint64_t split_mix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic combination of two seeds into one stream seed.
inline std::uint64_t mix_seeds(std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = a;
  const std::uint64_t h = split_mix64(state);
  state = h ^ b;
  return split_mix64(state);
}

// Seedable generator with a fixed draw encoding so runs replay bit for bit:
// every primitive below consumes exactly one 64-bit word from the stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    const int v = static_cast<int>(uniform() * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

  // 1 with probability p, else 0.
  int bernoulli(double p) { return uniform() < p ? 1 : 0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gts
