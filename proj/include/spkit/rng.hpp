#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, counter), so parallel execution order cannot change results.

#include <cstdint>

namespace spkit {

namespace detail {
inline std::uint64_t mix64(std::uint64_t v) {
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ull;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebull;
  v ^= v >> 31;
  return v;
}
}  // namespace detail

struct CounterRng {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::uint64_t bits(std::uint64_t counter) const {
    const std::uint64_t key =
        detail::mix64(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
    return detail::mix64(key ^ (counter + 0x632be59bd9b4e019ull));
  }

  // Uniform in [0, 1).
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  CounterRng substream(std::uint64_t s) const { return {seed, bits(~s)}; }
};

}  // namespace spkit
