#pragma once

#include <cstdint>
#include <initializer_list>

namespace davg::rng {

// Counter-based generator: every draw is a pure function of its key, so
// replications, nodes and time steps can be sampled in any order (or in
// parallel) and still produce the same stream. Keys are built by chaining
// the SplitMix64 finalizer over the key components.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t chain(std::uint64_t h, std::uint64_t v) {
  return mix64((h ^ v) + kGolden);
}

// Domain tags keep unrelated streams (means, samples, graph edges, ...)
// from ever sharing a counter.
enum class Stream : std::uint64_t {
  Means = 1,
  Observation = 2,
  ErdosRenyi = 3,
  MrpTransition = 4,
  SensingNoise = 5,
};

inline std::uint64_t key(std::uint64_t seed, Stream stream,
                         std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = chain(mix64(seed + kGolden), static_cast<std::uint64_t>(stream));
  for (std::uint64_t p : parts) h = chain(h, p);
  return h;
}

// Uniform on the open interval (0,1); never returns an endpoint, so the
// value is always a valid quantile argument.
constexpr double uniform01(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse normal CDF (Wichura's PPND16 rational approximation). Chosen over
// Box-Muller so draws are identical across platforms: no libm trig involved.
double normal_quantile(double p);

inline double standard_normal(std::uint64_t h) {
  return normal_quantile(uniform01(h));
}

}  // namespace davg::rng
