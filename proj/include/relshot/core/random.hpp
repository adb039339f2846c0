#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace relshot {

/// One SplitMix64 step; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives a child seed from a parent seed and a path of keys, so that each
/// (episode, relation, query) draws from its own stream regardless of the
/// order in which work is scheduled.
class SeedPath {
 public:
  explicit constexpr SeedPath(std::uint64_t root) noexcept : state_(splitmix64(root)) {}

  constexpr SeedPath then(std::uint64_t key) const noexcept {
    return SeedPath(state_ ^ splitmix64(key + 0x632be59bd9b4e019ULL), 0);
  }
  constexpr SeedPath then(std::string_view key) const noexcept {
    return then(fnv1a64(key));
  }
  constexpr std::uint64_t value() const noexcept { return splitmix64(state_); }

 private:
  constexpr SeedPath(std::uint64_t state, int) noexcept : state_(state) {}
  std::uint64_t state_;
};

/// Seeded generator with portable sampling helpers. The underlying engine's
/// output sequence is fixed by the standard; the helpers below avoid the
/// implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace relshot
