#pragma once

// Large-n estimators. Sample s always draws from RandomStream(seed,
// stream_base + s) and every tally is an integer, so results do not depend on
// the worker count or on how samples are split between workers.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pivotal_lab/constructions.hpp"
#include "pivotal_lab/core.hpp"
#include "pivotal_lab/exact.hpp"

namespace pivlab::mc {

inline constexpr double kZ95 = 1.959963984540054;

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t stream_begin = 0;
  std::uint64_t stream_end = 0;  // exclusive
};

struct Estimate {
  double point = 0.0;
  std::uint64_t n_samples = 0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  Provenance provenance;

  /// Binomial tally: stderr sqrt(p(1-p)/n), Wilson 95% interval.
  static Estimate binomial(std::uint64_t successes, std::uint64_t n, Provenance provenance = {});
  /// Sample mean from integer sums, normal-theory 95% interval.
  static Estimate mean(double sum, double sum_squares, std::uint64_t n, Provenance provenance = {});

  bool covers(double x) const noexcept { return ci_lo <= x && x <= ci_hi; }
  /// |point - x| <= width * stderr
  bool within(double x, double width = 4.0) const noexcept;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kZ95);

struct SamplingOptions {
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  unsigned threads = 1;
  double p = 0.5;
};

/// P[f(w) != f(N_eps w)] with w ~ P_p.
Estimate mc_disagreement(const BooleanFunction& f, double epsilon, const SamplingOptions& options);

/// Per-sample tribes statistics, all read off one profile scan.
struct TribesSampleStats {
  bool t_plus = false;   // Tribes(w)
  bool t_minus = false;  // Tribes(-w)
  std::uint64_t u = 0;   // tribes with exactly one -1
  std::uint64_t d = 0;   // tribes with exactly one +1
  std::uint64_t full_plus = 0;
  std::uint64_t full_minus = 0;
  Value maj = Value::Plus;
  Value f = Value::Zero;  // t_plus - t_minus
  Value g = Value::Plus;  // Maj bribed by f
  std::size_t pivotal_f = 0;
  std::size_t pivotal_g = 0;

  /// {f = 0, U > 0, D > 0}
  bool witness() const noexcept { return f == Value::Zero && u > 0 && d > 0; }
};

TribesSampleStats tribes_sample_stats(const TribesProfile& profile);

struct TribesAggregate {
  TribesParams params;
  double p = 0.5;
  Provenance provenance;
  std::uint64_t n_samples = 0;
  std::uint64_t f_zero = 0;
  std::uint64_t witness = 0;
  std::uint64_t t_plus = 0;
  std::uint64_t t_minus = 0;
  std::uint64_t u_sum = 0;
  std::uint64_t u_sq_sum = 0;
  std::uint64_t d_sum = 0;
  std::uint64_t pivotal_g_sum = 0;
  std::uint64_t pivotal_g_nonempty = 0;
  std::vector<std::uint64_t> thresholds;
  std::vector<std::uint64_t> u_above;          // #{U > a}
  std::vector<std::uint64_t> pivotal_g_above;  // #{|P_g| > a}
  std::array<std::array<std::uint64_t, 2>, 3> f_by_maj{};  // [f+1][maj == +1]

  void merge(const TribesAggregate& other);

  Estimate p_f_zero() const { return Estimate::binomial(f_zero, n_samples, provenance); }
  Estimate p_witness() const { return Estimate::binomial(witness, n_samples, provenance); }
  Estimate mean_u() const;
  Estimate p_u_above(std::size_t threshold_index) const;
  Estimate p_pivotal_g_above(std::size_t threshold_index) const;
  Estimate p_pivotal_g_nonempty() const { return Estimate::binomial(pivotal_g_nonempty, n_samples, provenance); }
};

TribesAggregate mc_tribes_stats(const TribesParams& params, const SamplingOptions& options,
                                std::span<const std::uint64_t> thresholds = {});

/// Closed form E[U] = k l (1-p) p^{l-1}.
double expected_pivotal_tribes(const TribesParams& params, double p = 0.5);

/// Empirical law of (f value, |pivotal set|) by generic flip-all evaluation.
exact::PivotalLaw mc_pivotal_count(const BooleanFunction& f, const SamplingOptions& options);

struct SandwichResult {
  Estimate g;       // P[g != g_eps]
  Estimate maj;     // P[Maj != Maj_eps]
  Estimate bribe;   // P[f(w) != 0 or f(N_eps w) != 0]
  std::uint64_t containment_violations = 0;  // samples with g changed but neither cause
  double combined_std_error = 0.0;
  bool bound_holds = false;  // g <= maj + bribe + 4 * combined stderr
};

/// Coupled estimates on the same (w, N_eps w) pairs.
SandwichResult mc_stability_sandwich(const TribesParams& params, double epsilon,
                                     const SamplingOptions& options);

}  // namespace pivlab::mc
