#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gptdetox {

// 64-bit FNV-1a. Used for cache keys, content hashes, and seed derivation;
// stable across platforms and runs.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

std::string to_hex(std::uint64_t value);

// Half-up rounding to 2 decimal places, the convention used for report tables.
double round2(double value);

std::string format2(double value);

}  // namespace gptdetox
