#pragma once

#include <cstdint>

// Deterministic randomness for every stochastic routine in the library.
//
// The generator is SplitMix64 (Steele, Lea, Flood; the java.util.SplittableRandom
// finalizer).  It is pinned on purpose: integer-only state transitions plus a
// 53-bit mantissa conversion make every stream bit-reproducible across
// platforms and compilers.  Monte Carlo code derives one independent stream
// per trial with derive_seed(seed, trial_index), so trial outcomes do not
// depend on how trials are batched across threads.

namespace negsched {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), n >= 1.  Unbiased: rejects the residue of
  // 2^64 mod n before reducing.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t reject_below = (0 - n) % n;
    std::uint64_t r = next_u64();
    while (r < reject_below) r = next_u64();
    return r % n;
  }

 private:
  std::uint64_t state_;
};

// Stream for substream `index` of a user-level seed.  Two mixing rounds keep
// adjacent indices statistically unrelated.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 outer(seed);
  const std::uint64_t base = outer.next_u64();
  SplitMix64 inner(base ^ (index * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
  return inner.next_u64();
}

}  // namespace negsched
