#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace skg {

// Counter-based deterministic random number generator.
//
// Output word i of a stream with key k is mix64(k + (i+1)*GOLDEN), where
// mix64 is the SplitMix64 finalizer.  Because each output depends only on
// (key, counter), streams can be created and consumed in any order without
// perturbing one another, which is what makes the whole toolkit's output
// independent of thread scheduling: every consumer derives its own stream
// key from (seed, label) and never shares generator state.
//
// Gaussian variates use the Marsaglia polar method rather than Box-Muller
// so that only sqrt/log appear; sin/cos round differently across libm
// implementations and would break byte-identical reruns between platforms.
class Prng {
 public:
  explicit Prng(std::uint64_t key) : key_(key) {}

  // Derives the key for a named substream.  The label is hashed with
  // FNV-1a (64-bit) and mixed into the parent seed, so e.g.
  // stream(seed, "eve/noise") and stream(seed, "bob/noise") are unrelated.
  static std::uint64_t derive(std::uint64_t seed, std::string_view label) {
    return mix64(seed ^ mix64(fnv1a64(label)));
  }

  static Prng stream(std::uint64_t seed, std::string_view label) {
    return Prng(derive(seed, label));
  }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal.  Generates pairs and caches the spare.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    have_spare_ = true;
    return u * factor;
  }

  static std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace skg
