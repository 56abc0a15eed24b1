#pragma once

#include <complex>
#include <cstdint>

namespace dynrmt {

// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's fixed-increment variant).
// Bijective on 64-bit words, used here as the mixing core of a counter-based
// generator: output i of stream `key` is mix64(key + (i+1)*kGolden).
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derive an independent substream key. Seeds and stream ids may be chosen
/// freely; distinct (seed, stream) pairs give decorrelated streams.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + kGolden * mix64(stream + kGolden));
}

/// Counter-based generator: stateless random access into a keyed stream.
/// Identical (key, counter) always yields identical output, independent of
/// call order, which is what makes parallel trial scheduling reproducible.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }

  std::uint64_t word(std::uint64_t counter) const {
    return mix64(key_ + (counter + 1) * kGolden);
  }

  /// Uniform double in (0,1); never returns 0 so log() is safe.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(word(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. One counter consumes two words; the
  /// transform is rejection-free so the mapping counter -> value is total.
  double normal(std::uint64_t counter) const;

  /// Standard complex normal: E[z]=0, E[|z|^2]=1, E[z^2]=0.
  std::complex<double> complex_normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

}  // namespace dynrmt
