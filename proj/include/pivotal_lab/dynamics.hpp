#pragma once

// Continuous-time product-chain dynamics on the hypercube and the count C of
// output changes over a time window.

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "pivotal_lab/constructions.hpp"
#include "pivotal_lab/core.hpp"
#include "pivotal_lab/montecarlo.hpp"
#include "pivotal_lab/random.hpp"

namespace pivlab::dyn {

/// Flip: every coordinate carries a rate-1 clock and reverses its sign when
/// it rings. Resample: the ring redraws the coordinate (+1 w.p. p).
enum class Semantics { Flip, Resample };

std::string_view to_string(Semantics s) noexcept;
Semantics semantics_from_string(std::string_view s);

struct DynamicsConfig {
  double duration = 1.0;
  Semantics semantics = Semantics::Flip;
  double p = 0.5;
  std::uint64_t trials = 10000;

  /// Throws UsageError on duration <= 0, p outside (0,1), or flip with p != 1/2
  /// (flips do not preserve P_p).
  void validate() const;
};

struct Trajectory {
  std::uint64_t changes = 0;  // C
  std::uint64_t events = 0;   // N ~ Poisson(n * duration)
  Value initial = Value::Zero;
  Value final = Value::Zero;
};

/// Draws X(0) from the stationary law, N ~ Poisson(n duration) clock rings at
/// uniformly chosen coordinates, and counts output changes. Event times are
/// not materialized.
Trajectory simulate_trajectory(IncrementalSession& session, std::size_t n, const DynamicsConfig& cfg,
                               RandomStream& rng);

/// Same law with explicit exponential inter-arrival times; returns the times
/// at which the output changed.
std::vector<double> simulate_change_times(IncrementalSession& session, std::size_t n,
                                          const DynamicsConfig& cfg, RandomStream& rng);

struct TrialOptions {
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  unsigned threads = 1;
  /// Re-evaluate f on the final configuration of every trajectory and compare
  /// with the session output (throws std::logic_error on mismatch).
  bool verify_sessions = false;
};

struct ChangeDistribution {
  std::map<std::uint64_t, std::uint64_t> histogram;  // C -> trials
  std::uint64_t trials = 0;
  std::uint64_t events_sum = 0;
  std::uint64_t events_sq_sum = 0;
  std::uint64_t changes_sum = 0;
  std::uint64_t changes_sq_sum = 0;
  std::array<std::uint64_t, 3> initial_values{};  // by to_int(v)+1
  std::array<std::uint64_t, 3> final_values{};
  mc::Provenance provenance;

  void merge(const ChangeDistribution& other);

  mc::Estimate p_zero() const;
  mc::Estimate mean_changes() const;
  mc::Estimate mean_events() const;
  double events_variance() const;
  /// Smallest c with P[C <= c] >= q.
  std::uint64_t quantile(double q) const;
};

ChangeDistribution run_trials(const BooleanFunction& f, const DynamicsConfig& cfg, const TrialOptions& options);

struct VolatilityEntry {
  nlohmann::json family;
  TribesParams params;  // meaningful for tribes-built families
  std::size_t n = 0;
  ChangeDistribution distribution;
};

struct VolatilityReport {
  std::vector<VolatilityEntry> entries;
  bool strictly_decreasing = false;  // point estimates of P[C=0]
  bool endpoints_separated = false;  // first - last > 4 * combined stderr

  bool decreasing() const noexcept { return strictly_decreasing && endpoints_separated; }
};

/// Builds the function for one schedule entry.
using FamilyBuilder = std::function<FunctionPtr(const ScheduleEntry&)>;

/// Entry e uses streams [stream_base + e * 2^40, ...).
VolatilityReport volatility_curve(const FamilyBuilder& build, std::span<const ScheduleEntry> entries,
                                  const DynamicsConfig& cfg, const TrialOptions& options);

/// The bound P[C = 0] <= eps + exp(-(1-eps) a) with eps^2 = P[|P| <= a].
struct BoundCheck {
  std::uint64_t a = 0;
  mc::Estimate p_small_pivotal;  // P[|P| <= a]
  mc::Estimate p_zero_changes;   // P[C = 0]
  double eps = 0.0;
  double bound = 0.0;
  double bound_std_error = 0.0;
  double margin = 0.0;  // bound - P[C = 0]
  bool holds = false;   // P[C=0] <= bound + 4 * (stderr of both sides)
};

/// Pivotal counts come from f.pivotal_count on stationary samples (O(l) for
/// the tribes families), trajectories from run_trials.
BoundCheck pivotal_bound_check(const BooleanFunction& f, std::uint64_t a, const DynamicsConfig& cfg,
                               std::uint64_t pivotal_samples, const TrialOptions& options);
/// Same check reusing an already simulated P[C = 0] for f under cfg.
BoundCheck pivotal_bound_check(const BooleanFunction& f, std::uint64_t a, const DynamicsConfig& cfg,
                               std::uint64_t pivotal_samples, const TrialOptions& options,
                               const mc::Estimate& p_zero_changes);

}  // namespace pivlab::dyn
