// Deterministic, splittable random streams.
//
// Every trial of a sweep draws from its own Xoshiro256** stream whose state is
// derived from (master_seed, stream indices) through SplitMix64, so results do
// not depend on scheduling. Uniform and Gaussian variates are produced with
// explicit bit manipulation and Box-Muller, keeping output identical across
// standard library implementations.
#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include "blindest/core.hpp"

namespace blindest {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  /// Stream for a (master seed, index path) pair, e.g. {grid_point, trial}.
  static Rng derive(std::uint64_t master_seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = master_seed;
    std::uint64_t mixed = splitmix64(h);
    for (std::uint64_t idx : path) {
      std::uint64_t st = mixed ^ (idx * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
      mixed = splitmix64(st);
    }
    return Rng(mixed);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a logarithm argument.
  double uniform_pos() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Pair of independent N(0,1) variates (Box-Muller).
  std::array<double, 2> normal_pair() {
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  /// Circularly-symmetric CN(0, variance): real and imaginary parts each N(0, variance/2).
  cplx complex_normal(double variance) {
    const auto [a, b] = normal_pair();
    const double sd = std::sqrt(variance / 2.0);
    return {sd * a, sd * b};
  }

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace blindest
