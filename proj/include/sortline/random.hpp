#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sortline {

using Rng = std::mt19937_64;

/// Uniform in [0, 1) from the top 53 bits.
inline double unit_uniform(Rng& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

/// Uniform in [0, n). Bias is below 2^-53 relative for the sizes used here.
inline int uniform_index(Rng& gen, int n) { return static_cast<int>(unit_uniform(gen) * n); }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seeds derived from one run seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(base) ^ stream) ^ index);
}

/// Generator state as text, for resumable runs.
inline std::string rng_state(const Rng& gen) {
  std::ostringstream os;
  os << gen;
  return os.str();
}

inline void restore_rng(Rng& gen, const std::string& state) {
  std::istringstream is(state);
  is >> gen;
  if (!is) throw std::runtime_error("corrupt generator state");
}

}  // namespace sortline
