#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace inkmotion {

// splitmix64 step; used to derive independent substream seeds from one
// master seed so parallel work stays deterministic regardless of schedule.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Hash-chains a master seed with a path of indices (e.g. {row, copy}).
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  for (std::uint64_t p : path) {
    s ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h = splitmix64(s);
  }
  return h;
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline std::mt19937_64 make_engine(std::uint64_t base,
                                   std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(derive_seed(base, path));
}

}  // namespace inkmotion
