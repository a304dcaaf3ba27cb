#include "pivotal_lab/dynamics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "pivotal_lab/parallel.hpp"

namespace pivlab::dyn {

namespace {

constexpr std::uint64_t kEntryStreamStride = std::uint64_t{1} << 40;
constexpr std::uint64_t kPivotalStreamOffset = std::uint64_t{1} << 48;

bool next_sign(const IncrementalSession& session, std::size_t i, const DynamicsConfig& cfg, RandomStream& rng) {
  if (cfg.semantics == Semantics::Flip) return !session.configuration().is_plus(i);
  return cfg.p == 0.5 ? (rng() >> 63) != 0 : rng.bernoulli(cfg.p);
}

}  // namespace

std::string_view to_string(Semantics s) noexcept { return s == Semantics::Flip ? "flip" : "resample"; }

Semantics semantics_from_string(std::string_view s) {
  if (s == "flip") return Semantics::Flip;
  if (s == "resample") return Semantics::Resample;
  throw UsageError("unknown dynamics semantics '" + std::string(s) + "' (flip|resample)");
}

void DynamicsConfig::validate() const {
  if (!(duration > 0.0)) throw UsageError("dynamics duration must be positive");
  if (!(p > 0.0 && p < 1.0)) throw UsageError("bias p must lie in (0,1)");
  if (semantics == Semantics::Flip && p != 0.5) {
    throw UsageError("flip semantics preserves only the uniform measure; use resample for p != 0.5");
  }
  if (trials == 0) throw UsageError("dynamics needs at least one trial");
}

Trajectory simulate_trajectory(IncrementalSession& session, std::size_t n, const DynamicsConfig& cfg,
                               RandomStream& rng) {
  Trajectory tr;
  session.reset(random_configuration(n, rng, cfg.p));
  Value current = session.value();
  tr.initial = current;
  if (n > 0) {
    std::poisson_distribution<std::uint64_t> clock(static_cast<double>(n) * cfg.duration);
    tr.events = clock(rng);
    for (std::uint64_t e = 0; e < tr.events; ++e) {
      const std::size_t i = rng.uniform_below(n);
      const Value next = session.update(i, next_sign(session, i, cfg, rng));
      if (next != current) {
        ++tr.changes;
        current = next;
      }
    }
  }
  tr.final = current;
  return tr;
}

std::vector<double> simulate_change_times(IncrementalSession& session, std::size_t n, const DynamicsConfig& cfg,
                                          RandomStream& rng) {
  std::vector<double> times;
  session.reset(random_configuration(n, rng, cfg.p));
  if (n == 0) return times;
  Value current = session.value();
  const double rate = static_cast<double>(n);
  double t = 0.0;
  while (true) {
    t += -std::log1p(-rng.uniform01()) / rate;
    if (t > cfg.duration) break;
    const std::size_t i = rng.uniform_below(n);
    const Value next = session.update(i, next_sign(session, i, cfg, rng));
    if (next != current) {
      times.push_back(t);
      current = next;
    }
  }
  return times;
}

// ---------------------------------------------------------------------------

void ChangeDistribution::merge(const ChangeDistribution& o) {
  for (const auto& [c, count] : o.histogram) histogram[c] += count;
  trials += o.trials;
  events_sum += o.events_sum;
  events_sq_sum += o.events_sq_sum;
  changes_sum += o.changes_sum;
  changes_sq_sum += o.changes_sq_sum;
  for (std::size_t v = 0; v < 3; ++v) {
    initial_values[v] += o.initial_values[v];
    final_values[v] += o.final_values[v];
  }
}

mc::Estimate ChangeDistribution::p_zero() const {
  const auto it = histogram.find(0);
  return mc::Estimate::binomial(it == histogram.end() ? 0 : it->second, trials, provenance);
}

mc::Estimate ChangeDistribution::mean_changes() const {
  return mc::Estimate::mean(static_cast<double>(changes_sum), static_cast<double>(changes_sq_sum), trials,
                            provenance);
}

mc::Estimate ChangeDistribution::mean_events() const {
  return mc::Estimate::mean(static_cast<double>(events_sum), static_cast<double>(events_sq_sum), trials,
                            provenance);
}

double ChangeDistribution::events_variance() const {
  if (trials < 2) return 0.0;
  const double nn = static_cast<double>(trials);
  const double mean = static_cast<double>(events_sum) / nn;
  return (static_cast<double>(events_sq_sum) - static_cast<double>(events_sum) * mean) / (nn - 1.0);
}

std::uint64_t ChangeDistribution::quantile(double q) const {
  if (trials == 0) throw UsageError("quantile of an empty distribution");
  const double target = q * static_cast<double>(trials);
  std::uint64_t cumulative = 0;
  for (const auto& [c, count] : histogram) {
    cumulative += count;
    if (static_cast<double>(cumulative) >= target) return c;
  }
  return histogram.rbegin()->first;
}

ChangeDistribution run_trials(const BooleanFunction& f, const DynamicsConfig& cfg, const TrialOptions& options) {
  cfg.validate();
  const std::size_t n = f.arity();
  ChangeDistribution total =
      parallel_tally<ChangeDistribution>(cfg.trials, options.threads, [&](std::uint64_t b, std::uint64_t e) {
        ChangeDistribution part;
        auto session = f.make_session();
        for (std::uint64_t t = b; t < e; ++t) {
          RandomStream rng(options.seed, options.stream_base + t);
          const Trajectory tr = simulate_trajectory(*session, n, cfg, rng);
          if (options.verify_sessions && f.evaluate(session->configuration()) != session->value()) {
            throw std::logic_error("incremental session diverged from direct evaluation");
          }
          ++part.histogram[tr.changes];
          ++part.trials;
          part.events_sum += tr.events;
          part.events_sq_sum += tr.events * tr.events;
          part.changes_sum += tr.changes;
          part.changes_sq_sum += tr.changes * tr.changes;
          ++part.initial_values[static_cast<std::size_t>(to_int(tr.initial) + 1)];
          ++part.final_values[static_cast<std::size_t>(to_int(tr.final) + 1)];
        }
        return part;
      });
  total.provenance = {options.seed, options.stream_base, options.stream_base + cfg.trials};
  return total;
}

VolatilityReport volatility_curve(const FamilyBuilder& build, std::span<const ScheduleEntry> entries,
                                  const DynamicsConfig& cfg, const TrialOptions& options) {
  VolatilityReport report;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const FunctionPtr f = build(entries[e]);
    TrialOptions entry_options = options;
    entry_options.stream_base = options.stream_base + e * kEntryStreamStride;
    VolatilityEntry entry;
    entry.family = f->descriptor();
    entry.params = entries[e].params();
    entry.n = f->arity();
    entry.distribution = run_trials(*f, cfg, entry_options);
    report.entries.push_back(std::move(entry));
  }
  if (report.entries.size() >= 2) {
    report.strictly_decreasing = true;
    for (std::size_t e = 1; e < report.entries.size(); ++e) {
      if (!(report.entries[e].distribution.p_zero().point < report.entries[e - 1].distribution.p_zero().point)) {
        report.strictly_decreasing = false;
      }
    }
    const auto first = report.entries.front().distribution.p_zero();
    const auto last = report.entries.back().distribution.p_zero();
    const double combined = std::hypot(first.std_error, last.std_error);
    report.endpoints_separated = first.point - last.point > 4.0 * combined;
  }
  return report;
}

BoundCheck pivotal_bound_check(const BooleanFunction& f, std::uint64_t a, const DynamicsConfig& cfg,
                               std::uint64_t pivotal_samples, const TrialOptions& options) {
  cfg.validate();
  return pivotal_bound_check(f, a, cfg, pivotal_samples, options, run_trials(f, cfg, options).p_zero());
}

BoundCheck pivotal_bound_check(const BooleanFunction& f, std::uint64_t a, const DynamicsConfig& cfg,
                               std::uint64_t pivotal_samples, const TrialOptions& options,
                               const mc::Estimate& p_zero_changes) {
  cfg.validate();
  if (pivotal_samples == 0) throw UsageError("pivotal_bound_check needs pivotal samples");
  struct Count {
    std::uint64_t hits = 0;
    void merge(const Count& o) { hits += o.hits; }
  };
  const std::size_t n = f.arity();
  const std::uint64_t base = options.stream_base + kPivotalStreamOffset;
  const Count small = parallel_tally<Count>(pivotal_samples, options.threads, [&](std::uint64_t b, std::uint64_t e) {
    Count c;
    for (std::uint64_t s = b; s < e; ++s) {
      RandomStream rng(options.seed, base + s);
      if (f.pivotal_count(random_configuration(n, rng, cfg.p)) <= a) ++c.hits;
    }
    return c;
  });

  BoundCheck out;
  out.a = a;
  out.p_small_pivotal = mc::Estimate::binomial(small.hits, pivotal_samples, {options.seed, base, base + pivotal_samples});
  out.p_zero_changes = p_zero_changes;
  out.eps = std::sqrt(out.p_small_pivotal.point);
  const double decay = std::exp(-(1.0 - out.eps) * static_cast<double>(a));
  out.bound = out.eps + decay;
  if (out.eps > 0.0) {
    const double slope = (1.0 + static_cast<double>(a) * decay) / (2.0 * out.eps);
    out.bound_std_error = slope * out.p_small_pivotal.std_error;
  }
  out.margin = out.bound - out.p_zero_changes.point;
  const double slack = 4.0 * std::hypot(out.bound_std_error, out.p_zero_changes.std_error);
  out.holds = out.p_zero_changes.point <= out.bound + slack;
  return out;
}

}  // namespace pivlab::dyn
