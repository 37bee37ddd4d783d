#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace noge {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood: "Fast splittable pseudorandom
// number generators").
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

// Counter-based deterministic PRNG. Every random draw in the project flows
// from one 64-bit run seed through named streams:
//
//   key      = splitmix64(seed ^ fnv1a64(tag, index_0, index_1, ...))
//   output_n = splitmix64(key + n * 0x9e3779b97f4a7c15)
//
// A stream is fully determined by (seed, tag, indices), so reproducing a run
// only requires storing the seed. Indices are hashed as 8 little-endian bytes
// each, after the tag bytes.
class Rng {
 public:
  Rng(uint64_t seed, std::string_view tag,
      std::initializer_list<uint64_t> indices = {}) {
    uint64_t h = 1469598103934665603ull;  // FNV-1a 64 offset basis
    for (char ch : tag) {
      h = (h ^ static_cast<uint64_t>(static_cast<unsigned char>(ch))) *
          1099511628211ull;
    }
    for (uint64_t v : indices) {
      for (int i = 0; i < 8; ++i) {
        h = (h ^ ((v >> (8 * i)) & 0xffull)) * 1099511628211ull;
      }
    }
    key_ = detail::splitmix64(seed ^ h);
  }

  uint64_t next_u64() {
    ++counter_;
    return detail::splitmix64(key_ + counter_ * 0x9e3779b97f4a7c15ull);
  }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Unbiased integer in [0, n) via rejection sampling.
  uint64_t next_below(uint64_t n) {
    const uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace noge
