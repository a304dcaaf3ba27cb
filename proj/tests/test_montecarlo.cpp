#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pivotal_lab/constructions.hpp"
#include "pivotal_lab/exact.hpp"
#include "pivotal_lab/montecarlo.hpp"
#include "pivotal_lab/random.hpp"

using namespace pivlab;
using Catch::Approx;

namespace {

mc::SamplingOptions opts(std::uint64_t samples, std::uint64_t seed, unsigned threads = 1) {
  mc::SamplingOptions o;
  o.n_samples = samples;
  o.seed = seed;
  o.threads = threads;
  return o;
}

double binomial_upper_tail(std::uint64_t n, double q, std::uint64_t a) {
  // P[Bin(n, q) > a] by direct summation of the pmf.
  double below = 0.0;
  for (std::uint64_t x = 0; x <= a; ++x) {
    below += std::exp(std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) + x * std::log(q) +
                      (n - x) * std::log1p(-q));
  }
  return 1.0 - below;
}

}  // namespace

TEST_CASE("Wilson interval matches its closed form", "[montecarlo]") {
  const double z = mc::kZ95;
  for (auto [s, n] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{5, 10}, {0, 20}, {97, 100}, {3, 1000}}) {
    const double ph = static_cast<double>(s) / n;
    const double denom = 1 + z * z / n;
    const double center = (ph + z * z / (2.0 * n)) / denom;
    const double half = z * std::sqrt(ph * (1 - ph) / n + z * z / (4.0 * n * n)) / denom;
    const auto w = mc::wilson_interval(s, n);
    CHECK(w.lo == Approx(std::max(0.0, center - half)).margin(1e-12));
    CHECK(w.hi == Approx(std::min(1.0, center + half)).margin(1e-12));
  }
  const auto e = mc::Estimate::binomial(30, 100);
  CHECK(e.point == 0.3);
  CHECK(e.std_error == Approx(std::sqrt(0.3 * 0.7 / 100)));
  CHECK(e.covers(0.3));
  CHECK(e.within(0.3 + 3.9 * e.std_error));
  CHECK_FALSE(e.within(0.3 + 4.1 * e.std_error));
}

TEST_CASE("zero noise never disagrees", "[montecarlo]") {
  const auto est = mc::mc_disagreement(*bribed_majority({3, 8}), 0.0, opts(2000, 1));
  CHECK(est.point == 0.0);
  CHECK(est.n_samples == 2000);
}

TEST_CASE("Monte Carlo disagreement agrees with exact values", "[montecarlo][statistical]") {
  CHECK(mc::mc_disagreement(*dictator(8, 3), 0.3, opts(40000, 2)).within(0.15));
  for (const auto& f : {majority(3), majority(9), bribed_majority({2, 4}), parity(6)}) {
    for (double eps : {0.05, 0.3}) {
      const double truth = exact::exact_disagreement(*f, eps);
      const auto est = mc::mc_disagreement(*f, eps, opts(40000, 3));
      CHECK(est.within(truth));
    }
  }
}

TEST_CASE("tribes statistics at (2,2) against enumeration", "[montecarlo][statistical]") {
  const auto agg = mc::mc_tribes_stats({2, 2}, opts(40000, 4));
  CHECK(agg.p_f_zero().within(6.0 / 16));
  CHECK(agg.mean_u().within(1.0));
  CHECK(mc::Estimate::binomial(agg.t_plus, agg.n_samples).within(7.0 / 16));
  const auto counts = exact::tribes_counts({2, 2});
  CHECK(agg.p_witness().within(static_cast<double>(counts.witness) / 16));
}

TEST_CASE("expected pivotal tribes matches the biased closed form", "[montecarlo][statistical]") {
  const TribesParams p{4, 50};
  for (double bias : {0.3, 0.5, 0.7}) {
    // A tribe has exactly one -1 with probability l (1-p) p^{l-1}.
    const double truth = 50 * 4 * (1 - bias) * std::pow(bias, 3);
    CHECK(mc::expected_pivotal_tribes(p, bias) == Approx(truth).epsilon(1e-12));
    auto o = opts(20000, 5);
    o.p = bias;
    CHECK(mc::mc_tribes_stats(p, o).mean_u().within(truth));
  }
  CHECK(mc::expected_pivotal_tribes({3, 4}) == Approx(static_cast<double>(exact::tribes_counts({3, 4}).u_sum) / 4096));
}

TEST_CASE("pivotal-tribe tail follows the binomial law", "[montecarlo][statistical]") {
  // k = 48, l = 4: U ~ Bin(48, 1/4).
  const std::uint64_t thresholds[] = {6, 12};
  const auto agg = mc::mc_tribes_stats({4, 48}, opts(40000, 6), thresholds);
  CHECK(binomial_upper_tail(48, 0.25, 6) > 0.95);
  CHECK(agg.p_u_above(0).within(binomial_upper_tail(48, 0.25, 6)));
  CHECK(agg.p_u_above(1).within(binomial_upper_tail(48, 0.25, 12)));
}

TEST_CASE("per-sample tribes statistics against flip-all pivotal sets", "[montecarlo]") {
  RandomStream rng(7, 0);
  const TribesParams p{3, 8};
  const auto f = bribable(p);
  const auto g = bribed_majority(p);
  int both_zero = 0;
  for (int s = 0; s < 3000; ++s) {
    const auto c = random_configuration(p.n(), rng, s % 2 ? 0.5 : 0.75);
    const auto st = mc::tribes_sample_stats(tribes_profile(p, c));
    REQUIRE(st.f == f->evaluate(c));
    REQUIRE(st.g == g->evaluate(c));
    REQUIRE(st.pivotal_f == pivotal_set(*f, c).size());
    REQUIRE(st.pivotal_g == pivotal_set(*g, c).size());
    if (!st.t_plus && !st.t_minus) {
      ++both_zero;
      REQUIRE(st.pivotal_f == st.u + st.d);
    }
  }
  CHECK(both_zero > 100);
}

TEST_CASE("empirical pivotal law tracks the exact law", "[montecarlo][statistical]") {
  const auto f = bribed_majority({2, 3});
  const auto truth = exact::pivotal_law(*f);
  const auto emp = mc::mc_pivotal_count(*f, opts(40000, 8));
  CHECK(emp.total == 40000);
  for (Value v : {Value::Minus, Value::Plus}) {
    for (std::size_t m = 0; m <= 6; ++m) {
      const double q = truth.probability(v, m);
      const double se = std::sqrt(std::max(q * (1 - q), 1e-6) / 40000);
      CHECK(std::abs(emp.probability(v, m) - q) <= 4 * se);
    }
  }
}

TEST_CASE("stability sandwich on coupled pairs", "[montecarlo][statistical]") {
  const auto zero = mc::mc_stability_sandwich({3, 8}, 0.0, opts(5000, 9));
  CHECK(zero.g.point == 0.0);
  CHECK(zero.maj.point == 0.0);
  CHECK(zero.bribe.point > 0.0);
  CHECK(zero.containment_violations == 0);
  for (double eps : {0.01, 0.1}) {
    const auto r = mc::mc_stability_sandwich({4, 16}, eps, opts(20000, 10));
    CHECK(r.containment_violations == 0);
    CHECK(r.bound_holds);
    CHECK(r.g.point <= r.maj.point + r.bribe.point);
  }
}

TEST_CASE("results do not depend on the worker count", "[montecarlo]") {
  const auto f = bribed_majority({3, 10});
  const auto a = mc::mc_disagreement(*f, 0.1, opts(20000, 11, 1));
  const auto b = mc::mc_disagreement(*f, 0.1, opts(20000, 11, 4));
  CHECK(a.point == b.point);
  CHECK(a.provenance.stream_begin == b.provenance.stream_begin);
  CHECK(a.provenance.stream_end == b.provenance.stream_end);

  const std::uint64_t thresholds[] = {2};
  const auto x = mc::mc_tribes_stats({5, 40}, opts(20000, 12, 1), thresholds);
  const auto y = mc::mc_tribes_stats({5, 40}, opts(20000, 12, 3), thresholds);
  CHECK(x.f_zero == y.f_zero);
  CHECK(x.witness == y.witness);
  CHECK(x.u_sq_sum == y.u_sq_sum);
  CHECK(x.pivotal_g_above == y.pivotal_g_above);
  CHECK(x.f_by_maj == y.f_by_maj);

  const auto s1 = mc::mc_stability_sandwich({3, 12}, 0.1, opts(10000, 13, 1));
  const auto s2 = mc::mc_stability_sandwich({3, 12}, 0.1, opts(10000, 13, 4));
  CHECK(s1.g.point == s2.g.point);
  CHECK(s1.bribe.point == s2.bribe.point);

  const auto l1 = mc::mc_pivotal_count(*majority(11), opts(5000, 14, 1));
  const auto l2 = mc::mc_pivotal_count(*majority(11), opts(5000, 14, 3));
  CHECK(l1 == l2);
}

TEST_CASE("different seeds give different tallies", "[montecarlo]") {
  const auto a = mc::mc_tribes_stats({4, 30}, opts(5000, 1));
  const auto b = mc::mc_tribes_stats({4, 30}, opts(5000, 2));
  CHECK(a.u_sum != b.u_sum);
}
