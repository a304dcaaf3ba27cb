#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "pivotal_lab/constructions.hpp"
#include "pivotal_lab/random.hpp"

using namespace pivlab;

namespace {

// Independent oracles working on codes (bit i set = coordinate i is +1).
int naive_tribes(std::uint64_t code, std::size_t l, std::size_t k) {
  const std::uint64_t tribe_mask = (std::uint64_t{1} << l) - 1;
  for (std::size_t t = 0; t < k; ++t) {
    if (((code >> (t * l)) & tribe_mask) == tribe_mask) return 1;
  }
  return 0;
}

int naive_bribable(std::uint64_t code, std::size_t l, std::size_t k) {
  const std::uint64_t all = (std::uint64_t{1} << (l * k)) - 1;
  return naive_tribes(code, l, k) - naive_tribes(~code & all, l, k);
}

int naive_majority(std::uint64_t code, std::size_t n) {
  const int plus = std::popcount(code);
  const int minus = static_cast<int>(n) - plus;
  return plus >= minus ? 1 : -1;
}

int naive_bribed(std::uint64_t code, std::size_t l, std::size_t k) {
  const int f = naive_bribable(code, l, k);
  return f != 0 ? f : naive_majority(code, l * k);
}

}  // namespace

TEST_CASE("families agree with enumeration oracles", "[constructions]") {
  for (std::size_t l = 1; l <= 4; ++l) {
    for (std::size_t k = 1; k <= 4 && l * k <= 14; ++k) {
      const TribesParams p{l, k};
      const auto t = tribes(p);
      const auto f = bribable(p);
      const auto g = bribed_majority(p);
      for (std::uint64_t code = 0; code < (std::uint64_t{1} << (l * k)); ++code) {
        const auto c = Configuration::from_code(l * k, code);
        REQUIRE(to_int(t->evaluate(c)) == naive_tribes(code, l, k));
        REQUIRE(to_int(f->evaluate(c)) == naive_bribable(code, l, k));
        REQUIRE(to_int(g->evaluate(c)) == naive_bribed(code, l, k));
      }
    }
  }
}

TEST_CASE("simple families on hand-checked points", "[constructions]") {
  CHECK(dictator(4, 2)->evaluate(Configuration::parse("--+-")) == Value::Plus);
  CHECK(parity(3)->evaluate(Configuration::parse("+--")) == Value::Plus);
  CHECK(parity(3)->evaluate(Configuration::parse("+-+")) == Value::Minus);
  CHECK(majority(3)->evaluate(Configuration::parse("+--")) == Value::Minus);
  CHECK(majority(4)->evaluate(Configuration::parse("++--")) == Value::Plus);
  CHECK_THROWS_AS(majority(4, TieRule::Error), UsageError);
  CHECK(constant(3, Value::Zero)->codomain() == Codomain::ZeroOne);
  CHECK_THROWS_AS(dictator(3, 3), UsageError);
}

TEST_CASE("tribes (2,2): values, probabilities and the bribed majority", "[constructions]") {
  const TribesParams p{2, 2};
  CHECK(tribes(p)->evaluate(Configuration::parse("++--")) == Value::Plus);
  CHECK(tribes(p)->evaluate(Configuration::parse("+-+-")) == Value::Zero);
  CHECK(bribable(p)->evaluate(Configuration::parse("++--")) == Value::Zero);
  CHECK(bribable(p)->evaluate(Configuration::parse("+++-")) == Value::Plus);
  CHECK(bribable(p)->evaluate(Configuration::parse("---+")) == Value::Minus);

  // Counted over all 16 configurations with the oracle.
  int t_one = 0, f_zero = 0, g_differs_from_maj = 0;
  const auto g = bribed_majority(p);
  const auto maj = majority(4);
  for (std::uint64_t code = 0; code < 16; ++code) {
    t_one += naive_tribes(code, 2, 2);
    f_zero += naive_bribable(code, 2, 2) == 0;
    const auto c = Configuration::from_code(4, code);
    g_differs_from_maj += g->evaluate(c) != maj->evaluate(c);
  }
  CHECK(t_one == 7);
  CHECK(f_zero == 6);
  CHECK(g_differs_from_maj == 0);
}

TEST_CASE("the bribable function is odd and bribing keeps f off its zero set", "[constructions]") {
  RandomStream rng(21, 0);
  const TribesParams p{3, 6};
  const auto f = bribable(p);
  const auto g = bribed_majority(p);
  const auto h = majority(p.n());
  for (int s = 0; s < 2000; ++s) {
    const auto c = random_configuration(p.n(), rng);
    CHECK(to_int(f->evaluate(negate(c))) == -to_int(f->evaluate(c)));
    const Value fv = f->evaluate(c);
    CHECK(g->evaluate(c) == (fv == Value::Zero ? h->evaluate(c) : fv));
  }
}

TEST_CASE("tribes pivotal counts from the profile match flip-all pivotal sets", "[constructions]") {
  RandomStream rng(22, 0);
  for (const TribesParams p : {TribesParams{1, 5}, TribesParams{2, 4}, TribesParams{3, 5}, TribesParams{4, 6}}) {
    for (const auto& f : {tribes(p), bribable(p), bribed_majority(p)}) {
      for (int s = 0; s < 300; ++s) {
        // Biased draws reach the full-tribe regimes more often.
        const double bias = (s % 3 == 0) ? 0.5 : (s % 3 == 1 ? 0.85 : 0.15);
        const auto c = random_configuration(p.n(), rng, bias);
        REQUIRE(f->pivotal_count(c) == pivotal_set(*f, c).size());
      }
    }
  }
}

TEST_CASE("majority and parity pivotal counts match flip-all pivotal sets", "[constructions]") {
  RandomStream rng(23, 0);
  for (std::size_t n : {1u, 4u, 7u, 10u}) {
    const auto m = majority(n);
    const auto x = parity(n);
    for (int s = 0; s < 200; ++s) {
      const auto c = random_configuration(n, rng);
      CHECK(m->pivotal_count(c) == pivotal_set(*m, c).size());
      CHECK(x->pivotal_count(c) == n);
    }
  }
}

TEST_CASE("profile histogram counts -1s per tribe", "[constructions]") {
  const TribesParams p{3, 3};
  const auto prof = tribes_profile(p, Configuration::parse("+++-+----"));
  CHECK(prof.minus_hist == std::vector<std::uint64_t>{1, 0, 1, 1});
  CHECK(prof.plus_count == 4);
  CHECK(prof.full_plus() == 1);
  CHECK(prof.full_minus() == 1);
  CHECK(prof.up_pivotal() == 0);
  CHECK(prof.down_pivotal() == 1);
}

TEST_CASE("sessions track evaluate under random updates", "[constructions]") {
  RandomStream rng(24, 0);
  const TribesParams p{3, 5};
  const std::vector<FunctionPtr> fs = {tribes(p), bribable(p), bribed_majority(p), majority(15), parity(15),
                                       dictator(15, 4), bribed(majority(15), bribable(p))};
  for (const auto& f : fs) {
    auto session = f->make_session();
    auto c = random_configuration(f->arity(), rng);
    session->reset(c);
    CHECK(session->value() == f->evaluate(c));
    for (int s = 0; s < 2000; ++s) {
      const std::size_t i = rng.uniform_below(f->arity());
      const bool plus = rng.bernoulli(0.5);
      c.set(i, plus);
      REQUIRE(session->update(i, plus) == f->evaluate(c));
      REQUIRE(session->configuration() == c);
    }
  }
}

TEST_CASE("descriptors round-trip through make_function", "[constructions]") {
  const TribesParams p{2, 3};
  const std::vector<FunctionPtr> fs = {dictator(6, 1), parity(6), constant(6, Value::Minus), majority(6),
                                       tribes(p), bribable(p), bribed_majority(p)};
  for (const auto& f : fs) {
    const auto back = make_function(f->descriptor());
    REQUIRE(back->arity() == f->arity());
    for (std::uint64_t code = 0; code < 64; ++code) {
      const auto c = Configuration::from_code(6, code);
      CHECK(back->evaluate(c) == f->evaluate(c));
    }
  }
  const auto shorthand = make_function(nlohmann::json{{"family", "bribed"}, {"l", 2}, {"k", 3}});
  for (std::uint64_t code = 0; code < 64; ++code) {
    CHECK(to_int(shorthand->evaluate(Configuration::from_code(6, code))) == naive_bribed(code, 2, 3));
  }
  CHECK_THROWS_AS(make_function(nlohmann::json{{"family", "nope"}}), UsageError);
}

TEST_CASE("tribes generators and their transitive action", "[constructions]") {
  const auto gens = tribes_generators({2, 2});
  REQUIRE(gens.size() == 2);
  CHECK(gens[0].image() == std::vector<std::size_t>{2, 3, 0, 1});
  CHECK(gens[1].image() == std::vector<std::size_t>{1, 0, 2, 3});
  for (const TribesParams p : {TribesParams{1, 3}, TribesParams{3, 4}, TribesParams{5, 2}}) {
    const auto g = tribes_generators(p);
    CHECK(acts_transitively(p.n(), g));
    CHECK(check_invariance(*bribable(p), g));
    CHECK(check_invariance(*bribed_majority(p), g));
  }
  CHECK(cyclic_shift(4).image() == std::vector<std::size_t>{1, 2, 3, 0});
}

TEST_CASE("schedule entries follow l = ceil(log2 k + log2 log2 k / 2)", "[constructions]") {
  const auto ks = doubling_range(8, 24);
  REQUIRE(ks.size() == 17);
  const auto entries = schedule(ks);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double lg = std::log2(static_cast<double>(ks[i]));
    const auto l = static_cast<std::size_t>(std::ceil(lg + 0.5 * std::log2(lg)));
    CHECK(entries[i].index == i + 1);
    CHECK(entries[i].l == l);
    const double tail = std::pow(2.0, -static_cast<double>(l));
    CHECK(entries[i].q0 == Catch::Approx(std::pow(1.0 - tail, static_cast<double>(ks[i]))).epsilon(1e-12));
    CHECK(entries[i].mu == Catch::Approx(ks[i] * l * tail).epsilon(1e-12));
  }
}

TEST_CASE("schedule reference points and trend flags", "[constructions]") {
  const std::vector<std::uint64_t> ks = {1024, std::uint64_t{1} << 20};
  const auto e = schedule(ks);
  CHECK(e[0].l == 12);
  CHECK(e[0].mu == 3.0);
  CHECK(e[0].q0 == Catch::Approx(std::exp(-0.25)).epsilon(1e-4));
  CHECK(e[1].l == 23);
  CHECK(e[1].mu == 2.875);

  const auto full = schedule(doubling_range(8, 24));
  for (std::size_t i = 1; i < full.size(); ++i) {
    CHECK(full[i].q0 > full[i - 1].q0);
    CHECK_FALSE(full[i].q0_not_increasing);
    CHECK(full[i].mu_not_increasing == !(full[i].mu > full[i - 1].mu));
  }
  // l jumps by two at k = 2^17, so mu drops there.
  CHECK(full[9].k == (std::uint64_t{1} << 17));
  CHECK(full[9].l == full[8].l + 2);
  CHECK(full[9].mu_not_increasing);
  CHECK(full[9].mu < full[8].mu);

  CHECK_THROWS_AS(schedule(std::vector<std::uint64_t>{2}), UsageError);
  CHECK(schedule(ks, Rounding::Round)[0].l == 12);
}

TEST_CASE("explicit schedule entries and thresholds", "[constructions]") {
  const auto e = schedule_entry(48, 4);
  CHECK(e.mu == 12.0);
  CHECK(e.params() == TribesParams{4, 48});
  ScheduleEntry m3;
  m3.mu = 3.0;
  ScheduleEntry m9;
  m9.mu = 9.0;
  CHECK(pivotal_threshold(m3, ThresholdRule::HalfMean) == 1);
  CHECK(pivotal_threshold(m9, ThresholdRule::HalfMean) == 4);
  CHECK(pivotal_threshold(m9, ThresholdRule::SqrtMean) == 3);
  CHECK(pivotal_threshold(m3, ThresholdRule::SqrtMean) == 1);
  CHECK(pivotal_threshold(m3, ThresholdRule::Explicit, 5) == 5);
  CHECK_THROWS_AS(pivotal_threshold(m3, ThresholdRule::Explicit, 0), UsageError);
  CHECK_THROWS_AS(schedule_entry(0, 3), UsageError);
}
