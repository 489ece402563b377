#pragma once

// Seeding for independent Monte Carlo runs. Run k of an experiment with base
// seed s draws from mt19937_64(derive_seed(s, k)), so results do not depend on
// how runs are scheduled across threads.

#include <cstdint>
#include <random>

namespace mutualsec {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g) noexcept {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace mutualsec
