#include "pivotal_lab/montecarlo.hpp"

#include <cmath>

#include "pivotal_lab/parallel.hpp"
#include "pivotal_lab/random.hpp"

namespace pivlab {

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace mc {

namespace {

void require_samples(const SamplingOptions& o) {
  if (o.n_samples == 0) throw UsageError("n_samples must be positive");
  if (!(o.p > 0.0 && o.p < 1.0)) throw UsageError("bias p must lie in (0,1)");
}

Provenance provenance_of(const SamplingOptions& o) {
  return {o.seed, o.stream_base, o.stream_base + o.n_samples};
}

struct Count {
  std::uint64_t hits = 0;
  void merge(const Count& o) { hits += o.hits; }
};

}  // namespace

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (phat + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, std::min(phat, centre - half)), std::min(1.0, std::max(phat, centre + half))};
}

Estimate Estimate::binomial(std::uint64_t successes, std::uint64_t n, Provenance provenance) {
  if (n == 0) throw UsageError("estimate over zero samples");
  Estimate e;
  e.n_samples = n;
  e.point = static_cast<double>(successes) / static_cast<double>(n);
  e.std_error = std::sqrt(e.point * (1.0 - e.point) / static_cast<double>(n));
  const Interval ci = wilson_interval(successes, n);
  e.ci_lo = ci.lo;
  e.ci_hi = ci.hi;
  e.provenance = provenance;
  return e;
}

Estimate Estimate::mean(double sum, double sum_squares, std::uint64_t n, Provenance provenance) {
  if (n == 0) throw UsageError("estimate over zero samples");
  const double nn = static_cast<double>(n);
  Estimate e;
  e.n_samples = n;
  e.point = sum / nn;
  const double var = n > 1 ? std::max(0.0, (sum_squares - sum * e.point) / (nn - 1.0)) : 0.0;
  e.std_error = std::sqrt(var / nn);
  e.ci_lo = e.point - kZ95 * e.std_error;
  e.ci_hi = e.point + kZ95 * e.std_error;
  e.provenance = provenance;
  return e;
}

bool Estimate::within(double x, double width) const noexcept {
  return std::abs(point - x) <= width * std_error;
}

Estimate mc_disagreement(const BooleanFunction& f, double epsilon, const SamplingOptions& options) {
  require_samples(options);
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("noise epsilon must lie in [0,1]");
  const std::size_t n = f.arity();
  const Count total = parallel_tally<Count>(options.n_samples, options.threads, [&](std::uint64_t b, std::uint64_t e) {
    Count c;
    for (std::uint64_t s = b; s < e; ++s) {
      RandomStream rng(options.seed, options.stream_base + s);
      const Configuration w = random_configuration(n, rng, options.p);
      const Configuration noisy = apply_noise(w, epsilon, rng, options.p);
      if (f.evaluate(w) != f.evaluate(noisy)) ++c.hits;
    }
    return c;
  });
  return Estimate::binomial(total.hits, options.n_samples, provenance_of(options));
}

// ---------------------------------------------------------------------------

TribesSampleStats tribes_sample_stats(const TribesProfile& profile) {
  TribesSampleStats s;
  s.full_plus = profile.full_plus();
  s.full_minus = profile.full_minus();
  s.t_plus = s.full_plus > 0;
  s.t_minus = s.full_minus > 0;
  s.u = profile.up_pivotal();
  s.d = profile.down_pivotal();
  s.maj = majority_value(profile.plus_count, profile.params.n());
  s.f = tribes_value(TribesKind::Bribable, profile);
  s.g = s.f != Value::Zero ? s.f : s.maj;
  s.pivotal_f = tribes_pivotal_count(TribesKind::Bribable, profile);
  s.pivotal_g = tribes_pivotal_count(TribesKind::BribedMajority, profile);
  return s;
}

void TribesAggregate::merge(const TribesAggregate& o) {
  n_samples += o.n_samples;
  f_zero += o.f_zero;
  witness += o.witness;
  t_plus += o.t_plus;
  t_minus += o.t_minus;
  u_sum += o.u_sum;
  u_sq_sum += o.u_sq_sum;
  d_sum += o.d_sum;
  pivotal_g_sum += o.pivotal_g_sum;
  pivotal_g_nonempty += o.pivotal_g_nonempty;
  for (std::size_t i = 0; i < u_above.size(); ++i) {
    u_above[i] += o.u_above[i];
    pivotal_g_above[i] += o.pivotal_g_above[i];
  }
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) f_by_maj[r][c] += o.f_by_maj[r][c];
  }
}

Estimate TribesAggregate::mean_u() const {
  return Estimate::mean(static_cast<double>(u_sum), static_cast<double>(u_sq_sum), n_samples, provenance);
}

Estimate TribesAggregate::p_u_above(std::size_t i) const {
  return Estimate::binomial(u_above.at(i), n_samples, provenance);
}

Estimate TribesAggregate::p_pivotal_g_above(std::size_t i) const {
  return Estimate::binomial(pivotal_g_above.at(i), n_samples, provenance);
}

TribesAggregate mc_tribes_stats(const TribesParams& params, const SamplingOptions& options,
                                std::span<const std::uint64_t> thresholds) {
  require_samples(options);
  TribesAggregate blank;
  blank.params = params;
  blank.p = options.p;
  blank.provenance = provenance_of(options);
  blank.thresholds.assign(thresholds.begin(), thresholds.end());
  blank.u_above.assign(thresholds.size(), 0);
  blank.pivotal_g_above.assign(thresholds.size(), 0);

  struct Part {
    TribesAggregate agg;
    void merge(const Part& o) { agg.merge(o.agg); }
  };

  Part total = parallel_tally<Part>(options.n_samples, options.threads, [&](std::uint64_t b, std::uint64_t e) {
    Part part{blank};
    TribesAggregate& a = part.agg;
    for (std::uint64_t s = b; s < e; ++s) {
      RandomStream rng(options.seed, options.stream_base + s);
      const Configuration w = random_configuration(params.n(), rng, options.p);
      const TribesSampleStats st = tribes_sample_stats(tribes_profile(params, w));
      ++a.n_samples;
      if (st.f == Value::Zero) ++a.f_zero;
      if (st.witness()) ++a.witness;
      if (st.t_plus) ++a.t_plus;
      if (st.t_minus) ++a.t_minus;
      a.u_sum += st.u;
      a.u_sq_sum += st.u * st.u;
      a.d_sum += st.d;
      a.pivotal_g_sum += st.pivotal_g;
      if (st.pivotal_g > 0) ++a.pivotal_g_nonempty;
      for (std::size_t i = 0; i < a.thresholds.size(); ++i) {
        if (st.u > a.thresholds[i]) ++a.u_above[i];
        if (st.pivotal_g > a.thresholds[i]) ++a.pivotal_g_above[i];
      }
      ++a.f_by_maj[static_cast<std::size_t>(to_int(st.f) + 1)][st.maj == Value::Plus ? 1 : 0];
    }
    return part;
  });
  total.agg.provenance = blank.provenance;
  return total.agg;
}

double expected_pivotal_tribes(const TribesParams& params, double p) {
  const double l = static_cast<double>(params.l);
  return static_cast<double>(params.k) * l * (1.0 - p) * std::pow(p, l - 1.0);
}

exact::PivotalLaw mc_pivotal_count(const BooleanFunction& f, const SamplingOptions& options) {
  require_samples(options);
  const std::size_t n = f.arity();
  struct Part {
    exact::PivotalLaw law;
    void merge(const Part& o) { law.merge(o.law); }
  };
  Part total = parallel_tally<Part>(options.n_samples, options.threads, [&](std::uint64_t b, std::uint64_t e) {
    Part part{exact::PivotalLaw::empty(n)};
    for (std::uint64_t s = b; s < e; ++s) {
      RandomStream rng(options.seed, options.stream_base + s);
      const Configuration w = random_configuration(n, rng, options.p);
      part.law.add(f.evaluate(w), pivotal_set(f, w).size());
    }
    return part;
  });
  return total.law;
}

// ---------------------------------------------------------------------------

SandwichResult mc_stability_sandwich(const TribesParams& params, double epsilon, const SamplingOptions& options) {
  require_samples(options);
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("noise epsilon must lie in [0,1]");
  struct Part {
    std::uint64_t g = 0, maj = 0, bribe = 0, violations = 0;
    void merge(const Part& o) {
      g += o.g;
      maj += o.maj;
      bribe += o.bribe;
      violations += o.violations;
    }
  };
  const Part total = parallel_tally<Part>(options.n_samples, options.threads, [&](std::uint64_t b, std::uint64_t e) {
    Part part;
    for (std::uint64_t s = b; s < e; ++s) {
      RandomStream rng(options.seed, options.stream_base + s);
      const Configuration w = random_configuration(params.n(), rng, options.p);
      const Configuration noisy = apply_noise(w, epsilon, rng, options.p);
      const TribesProfile before = tribes_profile(params, w);
      const TribesProfile after = tribes_profile(params, noisy);
      const Value f0 = tribes_value(TribesKind::Bribable, before);
      const Value f1 = tribes_value(TribesKind::Bribable, after);
      const Value m0 = majority_value(before.plus_count, params.n());
      const Value m1 = majority_value(after.plus_count, params.n());
      const Value g0 = f0 != Value::Zero ? f0 : m0;
      const Value g1 = f1 != Value::Zero ? f1 : m1;
      const bool g_changed = g0 != g1;
      const bool maj_changed = m0 != m1;
      const bool bribe_active = f0 != Value::Zero || f1 != Value::Zero;
      part.g += g_changed;
      part.maj += maj_changed;
      part.bribe += bribe_active;
      if (g_changed && !maj_changed && !bribe_active) ++part.violations;
    }
    return part;
  });
  const Provenance prov = provenance_of(options);
  SandwichResult r;
  r.g = Estimate::binomial(total.g, options.n_samples, prov);
  r.maj = Estimate::binomial(total.maj, options.n_samples, prov);
  r.bribe = Estimate::binomial(total.bribe, options.n_samples, prov);
  r.containment_violations = total.violations;
  r.combined_std_error = std::sqrt(r.g.std_error * r.g.std_error + r.maj.std_error * r.maj.std_error +
                                   r.bribe.std_error * r.bribe.std_error);
  r.bound_holds = r.g.point <= r.maj.point + r.bribe.point + 4.0 * r.combined_std_error;
  return r;
}

}  // namespace mc
}  // namespace pivlab
