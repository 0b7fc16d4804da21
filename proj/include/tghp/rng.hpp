#pragma once

#include <cmath>
#include <cstdint>

namespace tghp::rng {

// Counter-based random streams. Every draw is a pure function of
// (seed, purpose, stream index, counter), so replication r produces the
// same numbers whether the replications run serially or fanned out
// across threads.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Stream {
  std::uint64_t key = 0;
};

// Purpose labels keep substreams for different jobs disjoint.
enum class Purpose : std::uint64_t {
  fbm = 1,
  chaos_noise = 2,
  qmc_shift = 3,
  generic = 4,
};

inline Stream make_stream(std::uint64_t seed, Purpose purpose, std::uint64_t index) {
  Stream s;
  s.key = mix64(mix64(seed ^ 0x6a09e667f3bcc908ULL) ^
                (static_cast<std::uint64_t>(purpose) * 0xb5ad4eceda1ce2a9ULL));
  s.key = mix64(s.key ^ (index * 0x2545f4914f6cdd1dULL));
  return s;
}

inline std::uint64_t bits(const Stream& s, std::uint64_t counter) {
  return mix64(s.key ^ (counter * 0xd6e8feb86659fd93ULL));
}

// Uniform on (0,1), never returning an exact endpoint.
inline double uniform(const Stream& s, std::uint64_t counter) {
  return (static_cast<double>(bits(s, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller on counters (2c, 2c+1).
inline double normal(const Stream& s, std::uint64_t counter) {
  const double u1 = uniform(s, 2 * counter);
  const double u2 = uniform(s, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace tghp::rng
