#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace hom {

/// SplitMix64 step; used to expand seeds into generator states.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** (Blackman & Vigna). Uniform and normal variates are derived
/// with fixed formulas so streams are reproducible across platforms, unlike
/// the standard-library distributions.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  static constexpr std::string_view algorithm =
      "xoshiro256** seeded by splitmix64(seed, stream); uniform=(x>>11)*2^-53; "
      "normal=Box-Muller cosine branch";

  /// Independent stream `stream` of generator `seed`.
  explicit Xoshiro256(std::uint64_t seed, std::uint64_t stream = 0) noexcept {
    std::uint64_t sm = seed;
    const std::uint64_t mix = splitmix64(sm) ^ (stream * 0xD1B54A32D192ED03ULL);
    std::uint64_t state = mix;
    for (auto& s : s_) s = splitmix64(state);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open_zero() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal variate.
  double normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(uniform_open_zero()));
    return r * std::cos(2.0 * std::numbers::pi * uniform());
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace hom
