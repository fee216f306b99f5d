#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace noiseval {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seeded random stream. All derived draws are implemented here rather than
// with std::*_distribution, whose outputs are implementation-defined; this
// keeps artifacts byte-identical across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  // Independent stream for element `index` of a corpus-level run. Items can
  // then be processed in any order (or in parallel) without changing output.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state = index + 0x9E3779B97F4A7C15ULL;
    std::uint64_t b = splitmix64(state);
    return Rng(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double real01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return real01() < p; }

  // Index drawn proportionally to non-negative weights.
  std::size_t weighted(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = real01() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t seed) {
    std::uint64_t state = seed;
    return splitmix64(state);
  }

  std::mt19937_64 engine_;
};

// k distinct indices from [0, n), uniform without replacement.
// Partial Fisher-Yates; result is in draw order, not sorted.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng,
                                                           std::size_t n,
                                                           std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (k > n) k = n;
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace noiseval
