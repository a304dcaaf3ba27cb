#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace pivlab {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;
/// Stateless 64-bit finalizer (splitmix64 output function).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// xoshiro256** keyed by (seed, stream index). The pair fully determines the
/// sequence; stream indices are hashed through splitmix64 so neighbouring
/// indices give unrelated states.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

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

  /// Unbiased integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) noexcept { return uniform01() < p; }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Produces 64-bit words whose bits are i.i.d. Bernoulli(p), with p quantized to
/// a multiple of 2^-32. Uses the bit-sliced comparison of a uniform 32-bit
/// fraction against p, most significant digit first: at most 32 random words
/// per output word, typically about eight (p = 1/2 costs one word).
class BernoulliWords {
 public:
  explicit BernoulliWords(double p);

  std::uint64_t operator()(RandomStream& rng) const noexcept;
  void fill(std::span<std::uint64_t> out, RandomStream& rng) const noexcept;

  /// The probability actually realized after quantization.
  double probability() const noexcept;

 private:
  std::uint64_t threshold_ = 0;  // p * 2^32, in [0, 2^32]
  int lowest_bit_ = 0;
};

}  // namespace pivlab
