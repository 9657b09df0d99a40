#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace epicurve {

// Portable random stream. The engine and std::seed_seq are fully specified by
// the standard; the distributions below are written out so that results do not
// depend on the standard library implementation.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal deviate (Box-Muller, no caching).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by Rng.
template <class T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = rng.below(i);
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

/// Stable 64-bit FNV-1a hash, used to derive per-name random streams.
std::uint64_t stable_hash(std::string_view text);

}  // namespace epicurve
