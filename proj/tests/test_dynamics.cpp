#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "pivotal_lab/constructions.hpp"
#include "pivotal_lab/dynamics.hpp"
#include "pivotal_lab/exact.hpp"

using namespace pivlab;
using Catch::Approx;

namespace {

dyn::DynamicsConfig config(dyn::Semantics s, std::uint64_t trials, double duration = 1.0, double p = 0.5) {
  dyn::DynamicsConfig c;
  c.semantics = s;
  c.trials = trials;
  c.duration = duration;
  c.p = p;
  return c;
}

dyn::TrialOptions trial_options(std::uint64_t seed, unsigned threads = 1) {
  dyn::TrialOptions o;
  o.seed = seed;
  o.threads = threads;
  return o;
}

}  // namespace

TEST_CASE("semantics names round-trip", "[dynamics]") {
  CHECK(dyn::to_string(dyn::Semantics::Flip) == "flip");
  CHECK(dyn::semantics_from_string("resample") == dyn::Semantics::Resample);
  CHECK_THROWS_AS(dyn::semantics_from_string("swap"), UsageError);
}

TEST_CASE("configuration validation", "[dynamics]") {
  CHECK_NOTHROW(config(dyn::Semantics::Flip, 10).validate());
  CHECK_NOTHROW(config(dyn::Semantics::Resample, 10, 1.0, 0.3).validate());
  CHECK_THROWS_AS(config(dyn::Semantics::Flip, 10, 1.0, 0.3).validate(), UsageError);
  CHECK_THROWS_AS(config(dyn::Semantics::Flip, 10, 0.0).validate(), UsageError);
  CHECK_THROWS_AS(config(dyn::Semantics::Resample, 10, 1.0, 1.0).validate(), UsageError);
  CHECK_THROWS_AS(dyn::run_trials(*majority(3), config(dyn::Semantics::Flip, 10, 1.0, 0.3), trial_options(1)),
                  UsageError);
}

TEST_CASE("a constant function never changes", "[dynamics]") {
  const auto d = dyn::run_trials(*constant(20, Value::Plus), config(dyn::Semantics::Flip, 500), trial_options(1));
  CHECK(d.trials == 500);
  CHECK(d.p_zero().point == 1.0);
  CHECK(d.changes_sum == 0);
  CHECK(d.quantile(0.9) == 0);
}

TEST_CASE("a one-coordinate dictator keeps its value with probability e^{-rate d}", "[dynamics][statistical]") {
  const auto flip = dyn::run_trials(*dictator(1), config(dyn::Semantics::Flip, 40000), trial_options(2));
  CHECK(flip.p_zero().within(std::exp(-1.0)));
  const auto res = dyn::run_trials(*dictator(1), config(dyn::Semantics::Resample, 40000, 2.0), trial_options(3));
  CHECK(res.p_zero().within(std::exp(-2.0 * 0.5)));
  // A dictator on 8 coordinates only reacts to its own clock.
  const auto wide = dyn::run_trials(*dictator(8, 5), config(dyn::Semantics::Flip, 40000), trial_options(4));
  CHECK(wide.p_zero().within(std::exp(-1.0)));
}

TEST_CASE("parity changes on every effective ring", "[dynamics][statistical]") {
  const std::size_t n = 12;
  const auto flip = dyn::run_trials(*parity(n), config(dyn::Semantics::Flip, 20000, 0.5), trial_options(5));
  CHECK(flip.changes_sum == flip.events_sum);
  CHECK(flip.mean_changes().within(n * 0.5));
  const auto res = dyn::run_trials(*parity(n), config(dyn::Semantics::Resample, 20000, 0.5), trial_options(6));
  CHECK(res.mean_changes().within(n * 0.5 * 0.5));
}

TEST_CASE("clock ring count is Poisson(n d)", "[dynamics][statistical]") {
  const std::size_t n = 30;
  const double d = 0.7;
  const std::uint64_t trials = 40000;
  const auto dist = dyn::run_trials(*majority(n), config(dyn::Semantics::Flip, trials, d), trial_options(7));
  const double lambda = n * d;
  CHECK(dist.mean_events().within(lambda));
  // Var of the sample variance of a Poisson(lambda): about (lambda + 2 lambda^2) / trials.
  CHECK(std::abs(dist.events_variance() - lambda) <= 4 * std::sqrt((lambda + 2 * lambda * lambda) / trials));
}

TEST_CASE("dynamics start and stay stationary", "[dynamics][statistical]") {
  // Resample at p = 0.3: the output of Maj_5 is +1 with P_p[Maj_5 = +1] at time 0 and at the end.
  const auto f = majority(5);
  const double truth = exact::exact_prob(*f, Value::Plus, 0.3);
  const std::uint64_t trials = 40000;
  const auto dist = dyn::run_trials(*f, config(dyn::Semantics::Resample, trials, 1.5, 0.3), trial_options(8));
  const double expected[] = {trials * (1 - truth), trials * truth};
  for (const auto& counts : {dist.initial_values, dist.final_values}) {
    const double obs[] = {static_cast<double>(counts[0]), static_cast<double>(counts[2])};
    CHECK(counts[1] == 0);
    double stat = 0.0;
    for (int i = 0; i < 2; ++i) stat += (obs[i] - expected[i]) * (obs[i] - expected[i]) / expected[i];
    CHECK(stat < boost::math::quantile(boost::math::chi_squared(1.0), 0.999));
  }
}

TEST_CASE("session outputs are verified against evaluate", "[dynamics]") {
  auto o = trial_options(9);
  o.verify_sessions = true;
  const TribesParams p{3, 6};
  for (const auto& f : {bribed_majority(p), bribable(p), tribes(p), majority(17), parity(9)}) {
    CHECK_NOTHROW(dyn::run_trials(*f, config(dyn::Semantics::Flip, 300, 2.0), o));
  }
}

TEST_CASE("change times are ordered and inside the window", "[dynamics]") {
  RandomStream rng(10, 0);
  const auto f = parity(6);
  auto session = f->make_session();
  const auto cfg = config(dyn::Semantics::Flip, 1, 2.0);
  for (int t = 0; t < 50; ++t) {
    const auto times = dyn::simulate_change_times(*session, 6, cfg, rng);
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(times[i] >= 0.0);
      CHECK(times[i] <= 2.0);
      if (i > 0) CHECK(times[i] >= times[i - 1]);
    }
  }
}

TEST_CASE("the explicit-time simulator has the same change law", "[dynamics][statistical]") {
  RandomStream rng(11, 0);
  const auto f = dictator(1);
  auto session = f->make_session();
  const auto cfg = config(dyn::Semantics::Flip, 1);
  const int trials = 20000;
  int zero = 0;
  for (int t = 0; t < trials; ++t) zero += dyn::simulate_change_times(*session, 1, cfg, rng).empty();
  const double q = std::exp(-1.0);
  CHECK(std::abs(zero / static_cast<double>(trials) - q) <= 4 * std::sqrt(q * (1 - q) / trials));
}

TEST_CASE("trial results do not depend on the worker count", "[dynamics]") {
  const auto f = bribed_majority({3, 12});
  const auto cfg = config(dyn::Semantics::Flip, 3000);
  const auto a = dyn::run_trials(*f, cfg, trial_options(12, 1));
  const auto b = dyn::run_trials(*f, cfg, trial_options(12, 4));
  CHECK(a.histogram == b.histogram);
  CHECK(a.events_sum == b.events_sum);
  CHECK(a.final_values == b.final_values);
}

TEST_CASE("quantiles of the change distribution", "[dynamics]") {
  dyn::ChangeDistribution d;
  d.histogram = {{0, 5}, {1, 3}, {4, 2}};
  d.trials = 10;
  CHECK(d.quantile(0.5) == 0);
  CHECK(d.quantile(0.6) == 1);
  CHECK(d.quantile(0.8) == 1);
  CHECK(d.quantile(0.9) == 4);
  CHECK(d.p_zero().point == 0.5);
}

TEST_CASE("volatility curve and the pivotal bound", "[dynamics][statistical]") {
  const auto entries = schedule(doubling_range(6, 8));
  const dyn::FamilyBuilder build = [](const ScheduleEntry& e) { return bribed_majority(e.params()); };
  const auto cfg = config(dyn::Semantics::Flip, 2000);
  const auto report = dyn::volatility_curve(build, entries, cfg, trial_options(13));
  REQUIRE(report.entries.size() == 3);
  CHECK(report.entries[1].n == entries[1].l * entries[1].k);

  // Dictator: |P| = 1 always, so with a = 0 the bound is 0 + e^{-0} = 1.
  const auto trivial = dyn::pivotal_bound_check(*dictator(4), 0, cfg, 2000, trial_options(14));
  CHECK(trivial.p_small_pivotal.point == 0.0);
  CHECK(trivial.bound == Approx(1.0));
  CHECK(trivial.holds);

  // Parity: |P| = n, so with a < n the bound is exp(-a) and P[C = 0] = e^{-n d}.
  const auto par = dyn::pivotal_bound_check(*parity(5), 3, cfg, 2000, trial_options(15));
  CHECK(par.eps == 0.0);
  CHECK(par.bound == Approx(std::exp(-3.0)));
  CHECK(par.holds);

  const auto g = bribed_majority(entries[2].params());
  const auto full = dyn::pivotal_bound_check(*g, 1, cfg, 4000, trial_options(16));
  const auto reused = dyn::pivotal_bound_check(*g, 1, cfg, 4000, trial_options(16), full.p_zero_changes);
  CHECK(reused.bound == full.bound);
  CHECK(reused.p_zero_changes.point == full.p_zero_changes.point);
  CHECK(full.holds);
}
