#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "pivotal_lab/random.hpp"

using namespace pivlab;

namespace {

double chi2_critical(double df, double level = 0.999) {
  return boost::math::quantile(boost::math::chi_squared(df), level);
}

}  // namespace

TEST_CASE("a (seed, stream) pair fixes the sequence", "[random]") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> xa, xb, xc, xd;
  for (int i = 0; i < 64; ++i) {
    xa.push_back(a());
    xb.push_back(b());
    xc.push_back(c());
    xd.push_back(d());
  }
  CHECK(xa == xb);
  CHECK(xa != xc);
  CHECK(xa != xd);
  CHECK(a.seed() == 42);
  CHECK(a.stream() == 7);
}

TEST_CASE("neighbouring streams are uncorrelated in their first output bits", "[random][statistical]") {
  // Bit b of the first output across 4096 consecutive streams: each bit should
  // be set about half the time.
  const int streams = 4096;
  std::array<int, 64> ones{};
  for (int s = 0; s < streams; ++s) {
    RandomStream r(1, static_cast<std::uint64_t>(s));
    const std::uint64_t x = r();
    for (int b = 0; b < 64; ++b) ones[b] += static_cast<int>((x >> b) & 1u);
  }
  const double se = std::sqrt(streams * 0.25);
  for (int b = 0; b < 64; ++b) CHECK(std::abs(ones[b] - streams / 2.0) <= 5 * se);
}

TEST_CASE("uniform_below passes a chi-square goodness-of-fit test", "[random][statistical]") {
  for (std::uint64_t bound : {3ull, 10ull, 37ull}) {
    RandomStream rng(5, bound);
    const int draws = 200000;
    std::vector<int> counts(bound, 0);
    for (int i = 0; i < draws; ++i) {
      const auto x = rng.uniform_below(bound);
      REQUIRE(x < bound);
      ++counts[x];
    }
    const double expected = static_cast<double>(draws) / bound;
    double stat = 0.0;
    for (int c : counts) stat += (c - expected) * (c - expected) / expected;
    CHECK(stat < chi2_critical(static_cast<double>(bound - 1)));
  }
}

TEST_CASE("uniform01 stays in [0, 1) with mean one half", "[random][statistical]") {
  RandomStream rng(6, 0);
  const int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / draws - 0.5) <= 4 * std::sqrt(1.0 / 12 / draws));
}

TEST_CASE("Bernoulli words realize the requested rate bit by bit", "[random][statistical]") {
  for (double p : {0.5, 0.3, 0.9, 0.01}) {
    BernoulliWords gen(p);
    CHECK(std::abs(gen.probability() - p) <= 0x1.0p-32);
    RandomStream rng(7, static_cast<std::uint64_t>(p * 1000));
    const int words = 20000;
    std::array<std::uint64_t, 64> per_bit{};
    std::uint64_t total = 0;
    for (int w = 0; w < words; ++w) {
      const std::uint64_t x = gen(rng);
      total += static_cast<std::uint64_t>(std::popcount(x));
      for (int b = 0; b < 64; ++b) per_bit[b] += (x >> b) & 1u;
    }
    const double n = 64.0 * words;
    CHECK(std::abs(total / n - p) <= 4 * std::sqrt(p * (1 - p) / n));
    // Every bit position carries the same rate.
    const double se_bit = std::sqrt(p * (1 - p) / words);
    for (int b = 0; b < 64; ++b) CHECK(std::abs(per_bit[b] / static_cast<double>(words) - p) <= 5 * se_bit);
  }
}

TEST_CASE("Bernoulli words at the endpoints are constant", "[random]") {
  RandomStream rng(8, 0);
  BernoulliWords zero(0.0), one(1.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(zero(rng) == 0);
    CHECK(one(rng) == ~std::uint64_t{0});
  }
}

TEST_CASE("fill matches repeated single draws", "[random]") {
  BernoulliWords gen(0.37);
  RandomStream a(9, 1), b(9, 1);
  std::vector<std::uint64_t> filled(33);
  gen.fill(filled, a);
  for (auto w : filled) CHECK(w == gen(b));
}
