#pragma once

#include <cstdint>
#include <string_view>

namespace qac {

// Stable across platforms and runs; std::hash gives neither guarantee.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Maps (seed, key) to a uniform value in [0, 1).
constexpr double unit_hash(std::uint64_t seed, std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int i = 0; i < 8; ++i) {
    h ^= (seed >> (8 * i)) & 0xFF;
    h *= 0x100000001b3ULL;
  }
  h = mix64(fnv1a64(key, h));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace qac
