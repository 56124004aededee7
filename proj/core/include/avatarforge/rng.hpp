#pragma once

#include <cstdint>
#include <string_view>

namespace avatarforge {

// Deterministic 64-bit generator (splitmix64). We roll our own instead of
// <random> engines so streams are identical across standard libraries, which
// the byte-reproducibility contract depends on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
  std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  // Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_;
};

// FNV-1a, used to derive per-record / per-window RNG streams from string ids
// so shard order never affects results.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL));
  return r.next_u64();
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream) {
  return mix_seed(seed, fnv1a(stream));
}

}  // namespace avatarforge
