#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "tablabel/hash.hpp"

namespace tablabel {

// SplitMix64. Fully specified, so every sampling decision in the library is
// reproducible from a seed alone, independent of the standard library build.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Rejection-free modulo; bias is negligible for the
  // pool sizes used here and determinism is what matters.
  uint64_t uniform(uint64_t n) { return next() % n; }

  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Derives an independent stream for a (seed, tags...) coordinate, so callers
// can draw per-table / per-column randomness without carrying mutable state.
inline Rng rng_at(uint64_t seed, std::initializer_list<uint64_t> tags) {
  uint64_t h = seed ^ 0x6a09e667f3bcc909ULL;
  for (uint64_t t : tags) h = hash_combine(h, t);
  return Rng(h);
}

inline Rng rng_at(uint64_t seed, std::string_view tag, uint64_t extra = 0) {
  return Rng(hash_combine(hash_combine(seed ^ 0x6a09e667f3bcc909ULL, fnv1a64(tag)), extra));
}

// Fisher-Yates.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = rng.uniform(i);
    std::swap(items[i - 1], items[j]);
  }
}

// First k entries of a shuffled index range [0, n): a uniform sample without
// replacement, in shuffled order.
inline std::vector<size_t> sample_indices(size_t n, size_t k, Rng& rng) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  shuffle(idx, rng);
  if (k < n) idx.resize(k);
  return idx;
}

}  // namespace tablabel
