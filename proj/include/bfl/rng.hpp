#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>

namespace bfl {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Deterministic random stream, addressed by (master seed, purpose tag,
/// index). Work that fans out (Monte Carlo paths, battery trials) gives each
/// unit its own stream, so results do not depend on scheduling or worker
/// count. Generation is xoshiro256++ seeded through splitmix64; uniforms take
/// the top 53 bits of each word, so sequences are identical across standard
/// library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view purpose,
            std::uint64_t index = 0) {
    std::uint64_t s = master_seed;
    detail::splitmix64(s);
    s ^= detail::fnv1a64(purpose);
    detail::splitmix64(s);
    s ^= index;
    state_[0] = detail::splitmix64(s);
    state_[1] = detail::splitmix64(s);
    state_[2] = detail::splitmix64(s);
    state_[3] = detail::splitmix64(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
      state_[0] = 0x9E3779B97F4A7C15ull;  // xoshiro state must be nonzero
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); never returns an exact endpoint.
  double uniform01_open() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Strictly positive exponential waiting time.
  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::domain_error("exponential: rate must be > 0");
    return -std::log(uniform01_open()) / rate;
  }

  /// Index drawn proportionally to the (nonnegative) entries of `weights`.
  /// `total` must equal the sum of the entries.
  std::size_t categorical(std::span<const double> weights, double total) {
    const double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  /// Uniform bitmask with `nbits` random low bits.
  std::uint32_t mask(int nbits) {
    return std::uint32_t(next_u64() & ((std::uint64_t(1) << nbits) - 1));
  }

 private:
  std::uint64_t state_[4];
};

}  // namespace bfl
