#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace potnet {

// Counter-based 64-bit generator (splitmix64). Output i is a pure function
// of (state0 + i*gamma), so streams can be reproduced from a seed alone in
// any language; all randomness in this library flows through this type so
// that runs are bit-reproducible across platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; one uniform pair per draw keeps the
  // stream position independent of call history
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    // u1 == 0 would give log(0); shift into (0, 1]
    u1 = 1.0 - u1;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // unbiased integer in [0, n) by rejection
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Fisher-Yates permutation of [0, n)
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(p[i - 1], p[j]);
    }
    return p;
  }

private:
  std::uint64_t state_;
};

// Derives an independent stream from (seed, tags...). Mixing is the
// splitmix64 finalizer over the running state, so stream ids are stable
// and documented: state = mix(state ^ tag) for each tag in order.
inline std::uint64_t derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::uint64_t s = mix(seed + 0x9e3779b97f4a7c15ull);
  for (std::uint64_t t : tags) s = mix(s ^ (t + 0x9e3779b97f4a7c15ull));
  return s;
}

inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  return Rng(derive_stream(seed, tags));
}

// Fixed stream tags so independently written code agrees on sub-streams.
namespace stream {
inline constexpr std::uint64_t permute = 1;
inline constexpr std::uint64_t noise = 2;
inline constexpr std::uint64_t dropout = 3;
inline constexpr std::uint64_t init = 4;
inline constexpr std::uint64_t sliced = 5;
inline constexpr std::uint64_t sample = 6;
inline constexpr std::uint64_t data = 7;
inline constexpr std::uint64_t observation = 8;
}  // namespace stream

}  // namespace potnet
