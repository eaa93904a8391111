#pragma once

#include <cstdint>

#include "rwrp/types.hpp"

namespace rwrp {

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hash of (seed, coordinates, stream) into 64 bits. Environments are pure
// functions of this key, so traversal order never matters.
inline std::uint64_t hash_key(std::uint64_t seed, const IntVec& x, std::uint64_t stream) {
  std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
  for (auto c : x) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return mix64(h ^ (stream * 0xd6e8feb86659fd93ULL));
}

// Uniform on the open interval (0,1) from the top 53 bits.
inline double unit_open(std::uint64_t h) { return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53; }

inline double uniform_at(std::uint64_t seed, const IntVec& x, std::uint64_t stream) {
  return unit_open(hash_key(seed, x, stream));
}

// Sequential stream for sampling test cases and trial points.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t next() { return mix64(seed_ ^ mix64(++counter_)); }
  double uniform() { return unit_open(next()); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace rwrp
