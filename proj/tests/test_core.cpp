#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "pivotal_lab/constructions.hpp"
#include "pivotal_lab/core.hpp"
#include "pivotal_lab/random.hpp"

using namespace pivlab;

TEST_CASE("configuration text round trip and equality", "[core]") {
  const auto c = Configuration::parse("+-++-");
  CHECK(c.size() == 5);
  CHECK(c.to_string() == "+-++-");
  CHECK(c.is_plus(0));
  CHECK_FALSE(c.is_plus(1));
  CHECK(c.count_plus() == 3);
  CHECK(c == Configuration::from_code(5, 0b01101));
  CHECK(c.code() == 0b01101);
  CHECK_THROWS_AS(Configuration::parse("+x"), UsageError);
  CHECK_THROWS_AS(c.is_plus(5), UsageError);
}

TEST_CASE("padding bits stay zero across word boundaries", "[core]") {
  for (std::size_t n : {1u, 63u, 64u, 65u, 130u}) {
    auto c = Configuration::all_plus(n);
    CHECK(c.count_plus() == n);
    c.negate_in_place();
    CHECK(c.count_plus() == 0);
    c.negate_in_place();
    CHECK(c == Configuration::all_plus(n));
  }
}

TEST_CASE("flip is an involution at Hamming distance one", "[core]") {
  CHECK(flip(Configuration::parse("+++"), 2) == Configuration::parse("++-"));
  RandomStream rng(7, 0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.uniform_below(150);
    const auto c = random_configuration(n, rng);
    const std::size_t i = rng.uniform_below(n);
    CHECK(flip(flip(c, i), i) == c);
    CHECK(hamming_distance(c, flip(c, i)) == 1);
  }
  CHECK_THROWS_AS(flip(Configuration(3), 3), UsageError);
}

TEST_CASE("negate reverses every sign", "[core]") {
  CHECK(negate(Configuration::parse("+-")) == Configuration::parse("-+"));
  RandomStream rng(8, 0);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.uniform_below(200);
    const auto c = random_configuration(n, rng);
    CHECK(negate(negate(c)) == c);
    CHECK(c.count_plus() + negate(c).count_plus() == n);
  }
}

TEST_CASE("count_plus over ranges agrees with per-coordinate counting", "[core]") {
  RandomStream rng(9, 0);
  const auto c = random_configuration(300, rng);
  for (int t = 0; t < 200; ++t) {
    const std::size_t start = rng.uniform_below(300);
    const std::size_t len = rng.uniform_below(300 - start + 1);
    std::size_t naive = 0;
    for (std::size_t i = start; i < start + len; ++i) naive += c.is_plus(i);
    CHECK(c.count_plus(start, len) == naive);
  }
}

TEST_CASE("apply_noise: epsilon 0 is the identity, epsilon 1 ignores the input", "[core]") {
  RandomStream rng(10, 0);
  const auto c = random_configuration(1000, rng);
  CHECK(apply_noise(c, 0.0, rng) == c);
  // With epsilon = 1 the output depends only on the stream, not on the input.
  RandomStream a(11, 5), b(11, 5);
  CHECK(apply_noise(c, 1.0, a) == apply_noise(negate(c), 1.0, b));
  CHECK_THROWS_AS(apply_noise(c, 1.5, rng), UsageError);
  CHECK_THROWS_AS(apply_noise(c, -0.1, rng), UsageError);
}

TEST_CASE("apply_noise per-coordinate disagreement is epsilon/2 at p=1/2", "[core][statistical]") {
  const std::size_t n = 100000;
  const double eps = 0.2;
  RandomStream rng(12, 0);
  const auto c = random_configuration(n, rng);
  const auto d = apply_noise(c, eps, rng);
  const double rate = static_cast<double>(hamming_distance(c, d)) / n;
  const double se = std::sqrt(0.1 * 0.9 / n);
  CHECK(std::abs(rate - 0.1) <= 4 * se);
}

TEST_CASE("apply_noise under bias keeps the marginal p", "[core][statistical]") {
  const std::size_t n = 200000;
  RandomStream rng(13, 0);
  const auto c = random_configuration(n, rng, 0.3);
  const auto d = apply_noise(c, 0.5, rng, 0.3);
  const double se = std::sqrt(0.3 * 0.7 / n);
  CHECK(std::abs(static_cast<double>(c.count_plus()) / n - 0.3) <= 4 * se);
  CHECK(std::abs(static_cast<double>(d.count_plus()) / n - 0.3) <= 4 * se);
}

TEST_CASE("identical (seed, stream) reproduce identical noisy configurations", "[core]") {
  RandomStream a(99, 1234), b(99, 1234), c(99, 1235);
  const auto x = random_configuration(500, a);
  const auto y = random_configuration(500, b);
  CHECK(x == y);
  CHECK(apply_noise(x, 0.3, a) == apply_noise(y, 0.3, b));
  CHECK_FALSE(random_configuration(500, c) == x);
}

TEST_CASE("pivotal sets of small hand-checkable functions", "[core]") {
  CHECK(pivotal_set(*majority(3), Configuration::parse("++-")) == std::vector<std::size_t>{0, 1});
  CHECK(pivotal_set(*tribes({2, 2}), Configuration::parse("+-++")) == std::vector<std::size_t>{2, 3});
  RandomStream rng(14, 0);
  const auto k = constant(6, Value::Plus);
  for (int t = 0; t < 20; ++t) CHECK(pivotal_set(*k, random_configuration(6, rng)).empty());
  CHECK_THROWS_AS(pivotal_set(*majority(3), Configuration(4)), UsageError);
}

TEST_CASE("pivotality is edge-symmetric for Boolean functions", "[core]") {
  const std::vector<FunctionPtr> fs = {majority(5), parity(5), bribed_majority({2, 3}), dictator(4, 2)};
  for (const auto& f : fs) {
    const std::size_t n = f->arity();
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
      const auto c = Configuration::from_code(n, code);
      const auto piv = pivotal_set(*f, c);
      for (std::size_t i = 0; i < n; ++i) {
        const bool here = std::find(piv.begin(), piv.end(), i) != piv.end();
        const auto there = pivotal_set(*f, flip(c, i));
        CHECK(here == (std::find(there.begin(), there.end(), i) != there.end()));
      }
    }
  }
}

TEST_CASE("check_monotone finds violations and accepts monotone functions", "[core]") {
  CHECK(check_monotone(*majority(3)).monotone);
  const auto par = check_monotone(*parity(2));
  CHECK_FALSE(par.monotone);
  REQUIRE(par.lower.has_value());
  REQUIRE(par.coordinate.has_value());
  // The reported edge really decreases.
  const auto lower = *par.lower;
  CHECK_FALSE(lower.is_plus(*par.coordinate));
  CHECK(to_int(parity(2)->evaluate(flip(lower, *par.coordinate))) < to_int(parity(2)->evaluate(lower)));
  CHECK(check_monotone(*bribable({2, 2})).monotone);
  CHECK_THROWS_AS(check_monotone(*majority(23)), UsageError);
}

TEST_CASE("spot check flags parity and stays quiet on majority", "[core]") {
  RandomStream rng(15, 0);
  CHECK(spot_check_monotone(*parity(40), 1000, rng) == SpotCheck::Violated);
  CHECK(spot_check_monotone(*majority(41), 1000, rng) == SpotCheck::NoViolationFound);
}

TEST_CASE("invariance under generators and orbit closure", "[core]") {
  CHECK(check_invariance(*majority(5), std::vector<Permutation>{cyclic_shift(5)}));
  const TribesParams p22{2, 2};
  const auto gens = tribes_generators(p22);
  CHECK(check_invariance(*tribes(p22), gens));
  CHECK(orbit(4, gens, 0) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(acts_transitively(4, gens));
  // Swapping coordinates 1 and 2 crosses tribes and breaks the full tribe of (+,+,-,-).
  const Permutation swap12({0, 2, 1, 3});
  CHECK_FALSE(check_invariance(*tribes(p22), std::vector<Permutation>{swap12}));
  const auto witness = Configuration::parse("++--");
  CHECK(tribes(p22)->evaluate(witness) != tribes(p22)->evaluate(permute(witness, swap12)));
  InvarianceOptions sampled;
  sampled.mode = CheckMode::Sampled;
  sampled.samples = 2000;
  CHECK_FALSE(check_invariance(*tribes(p22), std::vector<Permutation>{swap12}, sampled));
  CHECK_THROWS_AS(Permutation({0, 0, 1}), UsageError);
  CHECK_THROWS_AS(check_invariance(*majority(5), std::vector<Permutation>{cyclic_shift(4)}), UsageError);
}

TEST_CASE("value helpers reject out-of-range values", "[core]") {
  CHECK(value_from_int(-1) == Value::Minus);
  CHECK(value_from_int(0) == Value::Zero);
  CHECK(value_from_int(1) == Value::Plus);
  CHECK_THROWS_AS(value_from_int(2), UsageError);
}
