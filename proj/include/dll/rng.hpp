#pragma once

#include <cstdint>

namespace dll {

// Purpose labels for the counter RNG. Every (seed, stream, index) triple maps
// to exactly one draw, so independent consumers stay reproducible as long as
// they use disjoint (stream, index) ranges.
enum class Stream : uint64_t {
  DataGen = 1,
  Split = 2,
  ParamInit = 3,
  Shuffle = 4,
  TrainTime = 5,
  TrainNoise = 6,
  EvalTime = 7,
  EvalNoise = 8,
  SampleInit = 9,
  SampleNoise = 10,
  Test = 1000,
};

namespace rng {

// SplitMix64 finalizer, full avalanche.
constexpr uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

constexpr uint64_t bits(uint64_t seed, Stream stream, uint64_t index) {
  uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull);
  h = mix64(h ^ (static_cast<uint64_t>(stream) * 0xd6e8feb86659fd93ull));
  return mix64(h + index * 0x9e3779b97f4a7c15ull);
}

// Uniform on the open interval (0,1), 53-bit resolution. Never returns an
// exact endpoint, so it is a valid input for the inverse normal CDF.
inline double uniform01(uint64_t seed, Stream stream, uint64_t index) {
  return static_cast<double>(bits(seed, stream, index) >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

inline double uniform(uint64_t seed, Stream stream, uint64_t index, double lo, double hi) {
  return lo + (hi - lo) * uniform01(seed, stream, index);
}

// Inverse standard normal CDF (Wichura's PPND16 rational approximations).
// Relative error below 1e-15 across (0,1), including the far tails.
double normal_icdf(double p);

inline double normal(uint64_t seed, Stream stream, uint64_t index) {
  return normal_icdf(uniform01(seed, stream, index));
}

// Uniform integer in [0, bound) via the 128-bit multiply trick.
inline uint32_t below(uint64_t seed, Stream stream, uint64_t index, uint32_t bound) {
  const uint64_t x = bits(seed, stream, index);
  return static_cast<uint32_t>((static_cast<__uint128_t>(x) * bound) >> 64);
}

}  // namespace rng

// Sequential view over one (seed, stream) lane. Position advances by one per
// draw; identical (seed, stream, position) always reproduces the same value.
struct RngState {
  uint64_t seed = 0;
  Stream stream = Stream::Test;
  uint64_t pos = 0;

  double next_uniform01() { return rng::uniform01(seed, stream, pos++); }
  double next_normal() { return rng::normal(seed, stream, pos++); }
};

}  // namespace dll
