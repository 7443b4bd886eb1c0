#pragma once

#include <cstdint>
#include <initializer_list>

namespace force2vec {

/// Splittable counter-style generator built on the splitmix64 mixer.
/// A stream is fully determined by (seed, stream key), so samplers keyed
/// by (epoch, batch) produce the same draws regardless of which worker
/// runs them or in what order.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix(mix(seed) ^ mix(stream ^ 0x9e3779b97f4a7c15ull))) {}

  /// Derive a stream from a composite key, e.g. {kSampling, epoch, batch}.
  static Rng keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::uint64_t s = mix(seed);
    for (std::uint64_t k : key) s = mix(s ^ mix(k ^ 0x9e3779b97f4a7c15ull));
    Rng r(0, 0);
    r.state_ = s;
    return r;
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Fixed-point multiply keeps the mapping
  /// branch-free and deterministic; the modulo bias at 64 bits is ~2^-64.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace force2vec
