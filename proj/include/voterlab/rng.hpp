#ifndef VOTERLAB_RNG_HPP
#define VOTERLAB_RNG_HPP

#include <cstdint>

namespace voterlab {

/// Counter-based generator: draw k of stream `seed` is the SplitMix64
/// finaliser applied to seed + (k+1) * golden gamma. Any draw can be
/// recomputed from (seed, k) alone, in any language.
class CounterRng {
 public:
  static constexpr const char *kAlgorithm = "splitmix64-counter";
  static constexpr int kVersion = 1;

  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
};

}  // namespace voterlab

#endif  // VOTERLAB_RNG_HPP
