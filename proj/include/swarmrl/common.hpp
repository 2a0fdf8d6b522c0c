#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace swarmrl {

// Error taxonomy. The CLI maps ConfigError to exit code 2 and everything
// else to exit code 1.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent RNG stream from (seed, stream, salt). Every worker
// owns several streams (init, actions, sampling, env, attraction) so that
// disabling one consumer leaves the others bit-identical.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t salt = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ (0x632be59bd9b4e019ULL * (stream + 1)));
  s = splitmix64(s ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
  return Rng(s);
}

// Uniform in [0, 1) with exactly one engine draw. Avoids the
// implementation-defined std::uniform_real_distribution so pinned-value
// tests can replay the stream.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform index in [0, n). Modulo bias is below 2^-44 for every n used here.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return rng() % n;
}

// Standard normal via Box-Muller; two engine draws per call, no cached state.
inline double gaussian(Rng& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  // Guard against log(0).
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace swarmrl
