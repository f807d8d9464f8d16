#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace dynassign {

// mt19937_64 with a hand-rolled unbiased draw. std::uniform_int_distribution
// is implementation-defined, which would break cross-platform replay of
// seeded traces; the rejection loop below is fully specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform over [0, n). Consumes no entropy when there is nothing to
  // choose (n <= 1), so forced moves never perturb the stream.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    constexpr std::uint64_t top = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t overhang = (top % n + 1) % n;  // 2^64 mod n
    const std::uint64_t accept_max = top - overhang;
    for (;;) {
      std::uint64_t v = gen_();
      if (v <= accept_max) return v % n;
    }
  }

  std::uint64_t next_u64() { return gen_(); }

  bool operator==(const Rng&) const = default;

 private:
  std::mt19937_64 gen_;
};

// Derives independent per-trial seeds from one base seed (splitmix64
// finalizer), so trial k is reproducible without running trials 0..k-1.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t k) {
  std::uint64_t x = base + 0x9E3779B97F4A7C15ull * (k + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

}  // namespace dynassign
