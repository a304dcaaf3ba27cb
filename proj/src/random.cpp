#include "pivotal_lab/random.hpp"

#include <bit>
#include <cmath>

#include "pivotal_lab/core.hpp"

namespace pivlab {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ULL;
  return mix64(state);
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream) {
  std::uint64_t state = mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ mix64(stream + 0x3c6ef372fe94f82bULL);
  for (auto& word : s_) word = splitmix64(state);
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RandomStream::uniform_below(std::uint64_t bound) noexcept {
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

BernoulliWords::BernoulliWords(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("Bernoulli probability outside [0,1]");
  threshold_ = static_cast<std::uint64_t>(std::llround(std::ldexp(p, 32)));
  lowest_bit_ = threshold_ == 0 ? 32 : std::countr_zero(threshold_);
}

std::uint64_t BernoulliWords::operator()(RandomStream& rng) const noexcept {
  if (threshold_ == 0) return 0;
  if (threshold_ >> 32) return ~std::uint64_t{0};
  // Per bit position, compare a fresh uniform fraction U = 0.u1u2... with
  // p = 0.b1b2...b32 from the most significant digit down; a position is
  // settled at its first differing digit, so the loop usually ends after a
  // handful of words.
  std::uint64_t below = 0;
  std::uint64_t open = ~std::uint64_t{0};
  for (int j = 31; j >= lowest_bit_ && open != 0; --j) {
    const std::uint64_t u = rng();
    if ((threshold_ >> j) & 1U) {
      below |= open & ~u;
      open &= u;
    } else {
      open &= ~u;
    }
  }
  return below;
}

void BernoulliWords::fill(std::span<std::uint64_t> out, RandomStream& rng) const noexcept {
  for (auto& w : out) w = (*this)(rng);
}

double BernoulliWords::probability() const noexcept { return std::ldexp(static_cast<double>(threshold_), -32); }

}  // namespace pivlab
