#pragma once

#include <cstdint>
#include <string_view>

namespace tablabel {

// FNV-1a, 64-bit. Used for feature hashing and file fingerprints, so it
// must stay stable across platforms and releases.
inline uint64_t fnv1a64(std::string_view s, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
  // boost-style mix, widened to 64 bit
  a ^= b + 0x9e3779b97f4a7c15ULL + (a << 12) + (a >> 4);
  return a;
}

}  // namespace tablabel
