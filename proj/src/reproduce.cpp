#include "pivotal_lab/reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>

#include "pivotal_lab/exact.hpp"
#include "pivotal_lab/montecarlo.hpp"

namespace pivlab::repro {

namespace {

using u128 = unsigned __int128;
using out::format_number;

// Independent sections of a suite draw from disjoint stream ranges.
constexpr std::uint64_t kSectionStride = std::uint64_t{1} << 52;
constexpr std::uint64_t kEntryStride = std::uint64_t{1} << 40;

class Timer {
 public:
  explicit Timer(std::map<int, double>& sink, int criterion)
      : sink_(sink), criterion_(criterion), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    sink_[criterion_] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  Timer(const Timer&) = delete;
  Timer& operator=(const Timer&) = delete;

 private:
  std::map<int, double>& sink_;
  int criterion_;
  std::chrono::steady_clock::time_point start_;
};

struct Context {
  const ExperimentConfig& cfg;
  const Overrides& over;
  SuiteResult& result;

  void check(std::string name, int criterion, bool passed, std::string detail) {
    result.checks.push_back({std::move(name), criterion, passed, std::move(detail)});
  }
  void file(std::string name, const out::Table& table) {
    result.files.push_back({std::move(name) + "." + std::string(out::extension(cfg.format)),
                            table.render(cfg.format, cfg.meta())});
  }
  mc::SamplingOptions sampling(std::uint64_t samples, std::uint64_t stream_base) const {
    mc::SamplingOptions o;
    o.n_samples = samples;
    o.seed = cfg.seed;
    o.stream_base = stream_base;
    o.threads = cfg.effective_threads();
    o.p = 0.5;
    return o;
  }
  std::vector<std::uint64_t> ks(std::initializer_list<unsigned> default_exponents) const {
    if (over.k) return cfg.k;
    std::vector<std::uint64_t> out;
    for (unsigned e : default_exponents) out.push_back(std::uint64_t{1} << e);
    return out;
  }
  std::vector<double> epsilons(std::vector<double> defaults) const { return over.epsilon ? cfg.epsilon : defaults; }
  std::uint64_t samples() const { return cfg.samples; }
  std::uint64_t trials() const { return cfg.trials; }
  /// Schedule entries for a k list, in the configured rounding.
  std::vector<ScheduleEntry> entries(const std::vector<std::uint64_t>& k_values) const {
    std::vector<ScheduleEntry> es;
    if (cfg.l) {
      for (auto k : k_values) es.push_back(schedule_entry(k, static_cast<std::size_t>(*cfg.l)));
      return es;
    }
    return schedule(k_values, cfg.rounding_rule());
  }
};

std::string pair_label(std::size_t l, std::size_t k) {
  return "(l=" + std::to_string(l) + ",k=" + std::to_string(k) + ")";
}

std::string family_name(const BooleanFunction& f) { return f.descriptor().value("family", std::string("?")); }

u128 ipow(u128 base, unsigned e) {
  u128 r = 1;
  while (e-- > 0) r *= base;
  return r;
}

/// {f = 0} recoded to -1 so {0,1}-valued functions get a spectral sample;
/// pivotal sets are unchanged by the recoding.
exact::TruthTable boolean_table(const BooleanFunction& f) {
  exact::TruthTable t = exact::truth_table(f, exact::kSpectralSampleCap);
  if (f.codomain() == Codomain::ZeroOne) {
    for (auto& v : t.values) {
      if (v == Value::Zero) v = Value::Minus;
    }
  }
  return t;
}

/// Trend along a sequence: no step decreases by more than 4 combined stderr
/// and the last point exceeds the first by more than 4 combined stderr.
struct Trend {
  bool steps_ok = true;
  bool strict = true;
  bool endpoints = false;
  double gap = 0.0;
  double gap_se = 0.0;

  bool passed() const { return steps_ok && endpoints; }
  std::string describe() const {
    return "last-first=" + format_number(gap) + " (4se=" + format_number(4.0 * gap_se) + ")" +
           ", no step decrease beyond 4se: " + (steps_ok ? "yes" : "no") +
           ", strict point increase: " + (strict ? "yes" : "no");
  }
};

Trend increasing_trend(const std::vector<mc::Estimate>& es) {
  Trend t;
  for (std::size_t i = 1; i < es.size(); ++i) {
    const double diff = es[i].point - es[i - 1].point;
    if (diff <= 0.0) t.strict = false;
    if (diff < -4.0 * std::hypot(es[i].std_error, es[i - 1].std_error)) t.steps_ok = false;
  }
  if (es.size() >= 2) {
    t.gap = es.back().point - es.front().point;
    t.gap_se = std::hypot(es.back().std_error, es.front().std_error);
    t.endpoints = t.gap > 4.0 * t.gap_se;
  }
  return t;
}

// ---------------------------------------------------------------------------

void suite_marginals(Context& ctx) {
  Timer timer(ctx.result.seconds, 5);
  struct Item {
    std::string name;
    FunctionPtr f;
  };
  const std::vector<Item> battery = {
      {"dictator(3)", dictator(3, 1)},
      {"parity(4)", parity(4)},
      {"majority(3)", majority(3)},
      {"majority(5)", majority(5)},
      {"tribes(2,2)", tribes({2, 2})},
      {"tribes(2,3)", tribes({2, 3})},
      {"bribed(2,2)", bribed_majority({2, 2})},
  };
  out::Table table({"function", "order", "i", "j", "pivotal", "spectral", "abs_diff"});
  for (const auto& item : battery) {
    const exact::TruthTable t = boolean_table(*item.f);
    const exact::SpectrumTable s = exact::wht(t);
    for (int order = 1; order <= 2; ++order) {
      const auto piv = exact::pivotal_marginals(t, order);
      const auto spec = exact::spectral_marginals(s, order);
      double worst = 0.0;
      for (std::size_t i = 0; i < t.n; ++i) {
        const std::size_t j_end = order == 1 ? i + 1 : t.n;
        for (std::size_t j = order == 1 ? i : i + 1; j < j_end; ++j) {
          const double a = order == 1 ? piv.at(i) : piv.at(i, j);
          const double b = order == 1 ? spec.at(i) : spec.at(i, j);
          worst = std::max(worst, std::abs(a - b));
          table.add_row({item.name, order, i, order == 1 ? nlohmann::ordered_json() : nlohmann::ordered_json(j), a, b,
                         std::abs(a - b)});
        }
      }
      ctx.check("marginals/" + item.name + "/order-" + std::to_string(order), 5, worst <= 1e-10,
                "max |pivotal - spectral| = " + format_number(worst) + " (tolerance 1e-10)");
    }
  }
  ctx.file("marginals", table);
}

// ---------------------------------------------------------------------------

void suite_sandwich(Context& ctx) {
  out::Table table({"l", "k", "n", "configurations", "tribes_zero", "expected_tribes_zero", "pivotal_tribes_sum",
                    "expected_pivotal_tribes_sum", "mean_x_given_t1", "mean_x", "mean_x_given_t0"});
  std::vector<std::string> law_bad, mean_bad, sandwich_bad;
  std::size_t law_pairs = 0, sandwich_pairs = 0;
  double law_seconds = 0.0;
  for (std::size_t l = 1; l <= 4; ++l) {
    for (std::size_t k = 1; k <= 5; ++k) {
      if (l * k > 20) continue;
      const auto start = std::chrono::steady_clock::now();
      const exact::TribesCounts c = exact::tribes_counts({l, k});
      law_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const unsigned n = static_cast<unsigned>(l * k);
      const u128 expected_zero = ipow((u128{1} << l) - 1, static_cast<unsigned>(k));
      // E[X] = k l 2^-l  <=>  sum X = k l 2^{n-l}
      const u128 expected_x = u128{k} * l << (n - l);
      ++law_pairs;
      if (u128{c.tribes_zero} != expected_zero) law_bad.push_back(pair_label(l, k));
      if (u128{c.x_sum()} != expected_x) mean_bad.push_back(pair_label(l, k));
      if (n <= 18) {
        ++sandwich_pairs;
        // E[X|T=1] <= E[X] <= E[X|T=0] by cross multiplication over exact counts.
        const u128 total = c.configurations;
        const bool lower = u128{c.x_sum_one} * total <= u128{c.x_sum()} * c.tribes_one;
        const bool upper = u128{c.x_sum()} * c.tribes_zero <= u128{c.x_sum_zero} * total;
        const bool positive = c.tribes_zero > 0 && c.tribes_one > 0;
        if (!(lower && upper && positive)) sandwich_bad.push_back(pair_label(l, k));
      }
      const double total = static_cast<double>(c.configurations);
      table.add_row({l, k, n, c.configurations, c.tribes_zero, static_cast<std::uint64_t>(expected_zero), c.x_sum(),
                     static_cast<std::uint64_t>(expected_x),
                     c.tribes_one ? static_cast<double>(c.x_sum_one) / static_cast<double>(c.tribes_one) : 0.0,
                     static_cast<double>(c.x_sum()) / total,
                     c.tribes_zero ? static_cast<double>(c.x_sum_zero) / static_cast<double>(c.tribes_zero) : 0.0});
    }
  }
  ctx.result.seconds[1] += law_seconds;
  ctx.result.seconds[2] += law_seconds;
  ctx.result.seconds[3] += law_seconds;
  auto detail = [](std::size_t pairs, const std::vector<std::string>& bad, const char* what) {
    std::string d = std::to_string(pairs) + " (l,k) pairs, " + what;
    if (!bad.empty()) {
      d += "; mismatches:";
      for (const auto& b : bad) d += " " + b;
    }
    return d;
  };
  ctx.check("sandwich/tribes-zero-law", 1, law_bad.empty(),
            detail(law_pairs, law_bad, "#{T=0} = (2^l-1)^k exactly"));
  ctx.check("sandwich/pivotal-tribes-mean", 2, mean_bad.empty(),
            detail(law_pairs, mean_bad, "sum of X = k l 2^(lk-l) exactly"));
  ctx.check("sandwich/conditional-order", 3, sandwich_bad.empty(),
            detail(sandwich_pairs, sandwich_bad, "E[X|T=1] <= E[X] <= E[X|T=0] in exact arithmetic"));
  ctx.file("sandwich", table);
}

// ---------------------------------------------------------------------------

void suite_bribable(Context& ctx) {
  {
    Timer timer(ctx.result.seconds, 4);
    out::Table table({"l", "k", "n", "f_monotone", "g_monotone", "f_invariant", "g_invariant", "orbit_size"});
    std::vector<std::string> mono_bad, inv_bad, orbit_bad;
    std::size_t pairs = 0;
    for (std::size_t l = 1; l <= 16; ++l) {
      for (std::size_t k = 1; l * k <= 16; ++k) {
        ++pairs;
        const TribesParams params{l, k};
        const auto f = bribable(params);
        const auto g = bribed_majority(params);
        const auto gens = tribes_generators(params);
        const bool fm = check_monotone(*f).monotone;
        const bool gm = check_monotone(*g).monotone;
        const bool fi = check_invariance(*f, gens);
        const bool gi = check_invariance(*g, gens);
        const std::size_t orbit_size = orbit(params.n(), gens, 0).size();
        if (!(fm && gm)) mono_bad.push_back(pair_label(l, k));
        if (!(fi && gi)) inv_bad.push_back(pair_label(l, k));
        if (orbit_size != params.n()) orbit_bad.push_back(pair_label(l, k));
        table.add_row({l, k, params.n(), fm, gm, fi, gi, orbit_size});
      }
    }
    auto detail = [&](const std::vector<std::string>& bad, const char* what) {
      std::string d = std::to_string(pairs) + " (l,k) pairs with lk <= 16, " + what;
      for (std::size_t i = 0; i < bad.size(); ++i) d += (i ? " " : "; failing: ") + bad[i];
      return d;
    };
    ctx.check("structure/monotone", 4, mono_bad.empty(), detail(mono_bad, "every edge of f and g checked"));
    ctx.check("structure/invariant", 4, inv_bad.empty(),
              detail(inv_bad, "f and g invariant under both tribes generators"));
    ctx.check("structure/transitive", 4, orbit_bad.empty(), detail(orbit_bad, "orbit of coordinate 0 is everything"));
    ctx.file("bribable_structure", table);
  }

  Timer timer(ctx.result.seconds, 7);
  const auto entries = ctx.entries(ctx.ks({10, 12, 14, 16, 18}));
  out::Table table({"k", "l", "n", "mu", "q0", "p_f_zero", "p_f_zero_stderr", "p_witness", "p_witness_stderr",
                    "mean_u", "mean_u_stderr", "mean_u_over_mu", "n_samples", "seed"});
  std::vector<mc::Estimate> f_zero, witness;
  std::vector<std::string> mean_bad;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& entry = entries[e];
    const auto agg = mc::mc_tribes_stats(entry.params(), ctx.sampling(ctx.samples(), e * kEntryStride));
    f_zero.push_back(agg.p_f_zero());
    witness.push_back(agg.p_witness());
    const auto mean_u = agg.mean_u();
    // mean(U)/mu within 1 +- 4 stderr_rel is |mean(U) - mu| <= 4 stderr.
    if (!mean_u.within(entry.mu)) mean_bad.push_back("k=" + std::to_string(entry.k));
    table.add_row({entry.k, entry.l, entry.params().n(), entry.mu, entry.q0, f_zero.back().point,
                   f_zero.back().std_error, witness.back().point, witness.back().std_error, mean_u.point,
                   mean_u.std_error, mean_u.point / entry.mu, agg.n_samples, ctx.cfg.seed});
  }
  const Trend tf = increasing_trend(f_zero);
  const Trend tw = increasing_trend(witness);
  ctx.check("trend/p-f-zero", 7, tf.passed(), tf.describe());
  ctx.check("trend/witness", 7, tw.passed(), tw.describe());
  std::string mean_detail = std::to_string(entries.size()) + " schedule points, |mean(U) - mu| <= 4 stderr";
  for (std::size_t i = 0; i < mean_bad.size(); ++i) mean_detail += (i ? " " : "; failing: ") + mean_bad[i];
  ctx.check("trend/mean-u", 7, mean_bad.empty(), mean_detail);
  ctx.file("bribable_trend", table);
}

// ---------------------------------------------------------------------------

void suite_stability(Context& ctx) {
  {
    Timer timer(ctx.result.seconds, 6);
    struct Item {
      std::string name;
      FunctionPtr f;
    };
    const std::vector<Item> battery = {
        {"majority(9)", majority(9)},
        {"parity(6)", parity(6)},
        {"tribes(3,4)", tribes({3, 4})},
        {"bribable(2,4)", bribable({2, 4})},
        {"bribed(4,4)", bribed_majority({4, 4})},
    };
    const auto eps_list = ctx.epsilons({0.05, 0.2, 0.5});
    out::Table table({"function", "quantity", "epsilon", "exact", "estimate", "stderr", "ci_lo", "ci_hi", "z"});
    std::uint64_t section = 0;
    std::vector<std::string> bad;
    std::size_t compared = 0;
    auto compare = [&](const std::string& fn, const std::string& quantity, double eps, double truth,
                       const mc::Estimate& est) {
      ++compared;
      const bool ok = est.within(truth);
      if (!ok) bad.push_back(fn + "/" + quantity + "@" + format_number(eps));
      const double z = est.std_error > 0 ? (est.point - truth) / est.std_error : 0.0;
      table.add_row({fn, quantity, eps, truth, est.point, est.std_error, est.ci_lo, est.ci_hi, z});
    };
    for (const auto& item : battery) {
      const auto t = exact::truth_table(*item.f);
      for (double eps : eps_list) {
        const auto est = mc::mc_disagreement(*item.f, eps, ctx.sampling(ctx.samples(), section++ * kEntryStride));
        compare(item.name, "disagreement", eps, exact::exact_disagreement(t, eps), est);
      }
    }
    for (const TribesParams params : {TribesParams{2, 4}, TribesParams{3, 4}, TribesParams{4, 4}}) {
      const auto c = exact::tribes_counts(params);
      const double total = static_cast<double>(c.configurations);
      const auto agg = mc::mc_tribes_stats(params, ctx.sampling(ctx.samples(), section++ * kEntryStride));
      const std::string fn = "tribes-stats" + pair_label(params.l, params.k);
      compare(fn, "p-f-zero", 0.0, static_cast<double>(c.bribable_zero) / total, agg.p_f_zero());
      compare(fn, "p-witness", 0.0, static_cast<double>(c.witness) / total, agg.p_witness());
      compare(fn, "p-tribes-one", 0.0, static_cast<double>(c.tribes_one) / total,
              mc::Estimate::binomial(agg.t_plus, agg.n_samples, agg.provenance));
      compare(fn, "mean-u", 0.0, static_cast<double>(c.u_sum) / total, agg.mean_u());
    }
    std::string detail = std::to_string(compared) + " estimates within 4 stderr of exact values";
    for (std::size_t i = 0; i < bad.size(); ++i) detail += (i ? " " : "; failing: ") + bad[i];
    ctx.check("mc-vs-exact/estimates", 6, bad.empty(), detail);
    ctx.file("stability_exact", table);

    // Repeated-runs calibration of the Wilson interval.
    constexpr int kRuns = 100;
    const auto f = majority(9);
    const double eps = 0.2;
    const double truth = exact::exact_disagreement(*f, eps);
    out::Table calib({"run", "estimate", "ci_lo", "ci_hi", "covers"});
    int covered = 0;
    const std::uint64_t runs_base = kSectionStride;
    for (int r = 0; r < kRuns; ++r) {
      const auto est = mc::mc_disagreement(*f, eps, ctx.sampling(10000, runs_base + r * kEntryStride));
      const bool cov = est.covers(truth);
      covered += cov;
      calib.add_row({r, est.point, est.ci_lo, est.ci_hi, cov});
    }
    ctx.check("mc-vs-exact/wilson-coverage", 6, covered >= 90,
              std::to_string(covered) + "/100 Wilson 95% intervals cover the exact majority(9) disagreement " +
                  format_number(truth) + " at epsilon 0.2 (need >= 90)");
    ctx.file("stability_calibration", calib);
  }

  Timer timer(ctx.result.seconds, 8);
  const auto entries = ctx.entries(ctx.ks({14}));
  const auto eps_list = ctx.epsilons({0.01, 0.05, 0.1});
  out::Table table({"k", "l", "epsilon", "p_g_changes", "p_maj_changes", "p_bribe_active", "combined_stderr",
                    "containment_violations", "bound_holds", "n_samples", "seed"});
  std::uint64_t section = 0;
  for (const auto& entry : entries) {
    for (double eps : eps_list) {
      const auto r = mc::mc_stability_sandwich(entry.params(), eps,
                                               ctx.sampling(ctx.samples(), 2 * kSectionStride + section++ * kEntryStride));
      ctx.check("sandwich/k=" + std::to_string(entry.k) + "/eps=" + format_number(eps), 8,
                r.bound_holds && r.containment_violations == 0,
                "P[g!=g_eps]=" + format_number(r.g.point) + " <= P[Maj!=Maj_eps]=" + format_number(r.maj.point) +
                    " + P[f!=0 or f_eps!=0]=" + format_number(r.bribe.point) + " + 4*" +
                    format_number(r.combined_std_error) + ", containment violations " +
                    std::to_string(r.containment_violations));
      table.add_row({entry.k, entry.l, eps, r.g.point, r.maj.point, r.bribe.point, r.combined_std_error,
                     r.containment_violations, r.bound_holds, r.g.n_samples, ctx.cfg.seed});
    }
  }
  ctx.file("stability_sandwich", table);
}

// ---------------------------------------------------------------------------

void suite_pivotal_abundance(Context& ctx) {
  Timer timer(ctx.result.seconds, 0);
  {
    out::Table table({"l", "k", "n", "tribes_zero", "pivotal_equals_x_on_t0", "mean_x_given_t0", "mu"});
    std::vector<std::string> ident_bad, mean_bad;
    std::size_t pairs = 0;
    for (std::size_t l = 1; l <= 16; ++l) {
      for (std::size_t k = 1; l * k <= 16; ++k) {
        ++pairs;
        const auto c = exact::tribes_counts({l, k});
        if (c.x_equals_pivotal_on_zero != c.tribes_zero || c.pivotal_sum_zero != c.x_sum_zero) {
          ident_bad.push_back(pair_label(l, k));
        }
        if (!(u128{c.x_sum_zero} * c.configurations >= u128{c.x_sum()} * c.tribes_zero)) {
          mean_bad.push_back(pair_label(l, k));
        }
        const double mu = static_cast<double>(k * l) * std::ldexp(1.0, -static_cast<int>(l));
        table.add_row({l, k, l * k, c.tribes_zero, c.x_equals_pivotal_on_zero,
                       static_cast<double>(c.x_sum_zero) / static_cast<double>(c.tribes_zero), mu});
      }
    }
    auto detail = [&](const std::vector<std::string>& bad, const char* what) {
      std::string d = std::to_string(pairs) + " (l,k) pairs with lk <= 16, " + what;
      for (std::size_t i = 0; i < bad.size(); ++i) d += (i ? " " : "; failing: ") + bad[i];
      return d;
    };
    ctx.check("exact/pivotal-set-is-pivotal-tribes", 0, ident_bad.empty(),
              detail(ident_bad, "|P_T| = X on every configuration with T = 0"));
    ctx.check("exact/conditional-mean-at-least-mu", 0, mean_bad.empty(),
              detail(mean_bad, "E[|P_T| | T=0] >= k l 2^-l"));
    ctx.file("pivotal_exact", table);
  }
  {
    std::size_t compared = 0;
    std::vector<std::string> bad;
    for (const TribesParams params : {TribesParams{3, 4}, TribesParams{5, 6}, TribesParams{2, 40}}) {
      const std::vector<FunctionPtr> fs = {tribes(params), bribable(params), bribed_majority(params)};
      for (std::size_t s = 0; s < 300; ++s) {
        RandomStream rng(ctx.cfg.seed, 3 * kSectionStride + s);
        const Configuration w = random_configuration(params.n(), rng);
        for (const auto& f : fs) {
          ++compared;
          if (f->pivotal_count(w) != pivotal_set(*f, w).size()) {
            bad.push_back(family_name(*f) + pair_label(params.l, params.k));
          }
        }
      }
    }
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    std::string detail = std::to_string(compared) + " profile-based pivotal counts match flip-every-coordinate";
    for (std::size_t i = 0; i < bad.size(); ++i) detail += (i ? " " : "; failing: ") + bad[i];
    ctx.check("analytic/pivotal-count-identity", 0, bad.empty(), detail);
  }

  const auto entries = ctx.entries(ctx.ks({10, 12, 14, 16}));
  out::Table table({"k", "l", "mu", "a", "p_u_above_a", "p_u_above_a_stderr", "exact_p_u_above_a",
                    "p_pivotal_g_above_a", "p_pivotal_g_above_a_stderr", "p_pivotal_g_nonempty", "n_samples",
                    "seed"});
  std::vector<std::string> bad;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& entry = entries[e];
    const std::uint64_t a = pivotal_threshold(entry, ctx.cfg.threshold_rule(), ctx.cfg.a.value_or(1));
    const std::uint64_t thresholds[] = {a};
    const auto agg = mc::mc_tribes_stats(entry.params(),
                                         ctx.sampling(ctx.samples(), 4 * kSectionStride + e * kEntryStride), thresholds);
    // U counts tribes with exactly one -1: Binomial(k, l 2^-l).
    const boost::math::binomial_distribution<double> law(static_cast<double>(entry.k),
                                                         static_cast<double>(entry.l) *
                                                             std::ldexp(1.0, -static_cast<int>(entry.l)));
    const double exact_tail = boost::math::cdf(boost::math::complement(law, static_cast<double>(a)));
    const auto u_tail = agg.p_u_above(0);
    const auto g_tail = agg.p_pivotal_g_above(0);
    if (!u_tail.within(exact_tail)) bad.push_back("k=" + std::to_string(entry.k));
    table.add_row({entry.k, entry.l, entry.mu, a, u_tail.point, u_tail.std_error, exact_tail, g_tail.point,
                   g_tail.std_error, agg.p_pivotal_g_nonempty().point, agg.n_samples, ctx.cfg.seed});
  }
  std::string detail = std::to_string(entries.size()) + " schedule points, P[U > a_n] within 4 stderr of the binomial tail";
  for (std::size_t i = 0; i < bad.size(); ++i) detail += (i ? " " : "; failing: ") + bad[i];
  ctx.check("schedule/pivotal-tail", 0, bad.empty(), detail);
  ctx.file("pivotal_schedule", table);
}

// ---------------------------------------------------------------------------

void suite_volatility(Context& ctx) {
  Timer timer(ctx.result.seconds, 9);
  const ExperimentConfig& cfg = ctx.cfg;
  dyn::DynamicsConfig dc;
  dc.duration = cfg.duration;
  dc.semantics = cfg.semantics;
  dc.p = cfg.p;
  dc.trials = ctx.trials();
  dc.validate();
  dyn::TrialOptions to;
  to.seed = cfg.seed;
  to.threads = cfg.effective_threads();

  // Probability that one clock ring changes the coordinate.
  const double change_rate = dc.semantics == dyn::Semantics::Flip ? 1.0 : 2.0 * dc.p * (1.0 - dc.p);
  out::Table controls = out::dynamics_table();
  {
    dyn::DynamicsConfig dict_cfg = dc;
    dict_cfg.trials = ctx.over.trials ? ctx.trials() : 10 * ctx.trials();
    to.stream_base = 0;
    const auto d = dyn::run_trials(*dictator(1, 0), dict_cfg, to);
    const auto p0 = d.p_zero();
    const double truth = std::exp(-change_rate * dc.duration);
    ctx.check("controls/dictator-no-change", 9, p0.within(truth),
              "P[C=0]=" + format_number(p0.point) + " vs " + format_number(truth) + ", stderr " +
                  format_number(p0.std_error) + ", " + std::to_string(dict_cfg.trials) + " trials");
    out::add_dynamics_row(controls, "dictator", 0, 0, 1, dict_cfg, d);
  }
  {
    constexpr std::size_t kParityN = 16;
    to.stream_base = kSectionStride;
    const auto d = dyn::run_trials(*parity(kParityN), dc, to);
    const auto mean_c = d.mean_changes();
    const double truth = static_cast<double>(kParityN) * dc.duration * change_rate;
    ctx.check("controls/parity-mean-changes", 9, mean_c.within(truth),
              "mean C=" + format_number(mean_c.point) + " vs n*duration*rate=" + format_number(truth) + ", stderr " +
                  format_number(mean_c.std_error));
    out::add_dynamics_row(controls, "parity", 0, 0, kParityN, dc, d);
  }
  ctx.file("volatility_controls", controls);

  const auto entries = ctx.entries(ctx.ks({10, 11, 12, 13, 14}));
  auto build = [&](const ScheduleEntry& entry) {
    if (is_tribes_family(cfg.family)) {
      ExperimentConfig c = cfg;
      c.l = entry.l;
      return build_function(c, entry.k);
    }
    ExperimentConfig c = cfg;
    if (!c.n) c.n = entry.params().n();
    return build_function(c, entry.k);
  };
  to.stream_base = 2 * kSectionStride;
  const auto report = dyn::volatility_curve(build, entries, dc, to);
  out::Table sweep = out::dynamics_table();
  std::string points;
  for (const auto& e : report.entries) {
    out::add_dynamics_row(sweep, e.family.value("family", std::string("?")), e.params.k, e.params.l, e.n, dc,
                          e.distribution);
    points += (points.empty() ? "" : " ") + format_number(e.distribution.p_zero().point);
  }
  ctx.check("sweep/p-c0-strictly-decreasing", 9, report.strictly_decreasing,
            "family " + cfg.family + ", P[C=0] along the sweep: " + points);
  {
    const auto first = report.entries.front().distribution.p_zero();
    const auto last = report.entries.back().distribution.p_zero();
    ctx.check("sweep/p-c0-endpoints-separated", 9, report.endpoints_separated,
              "first-last=" + format_number(first.point - last.point) +
                  " (4se=" + format_number(4.0 * std::hypot(first.std_error, last.std_error)) + ")");
  }
  ctx.file("volatility_sweep", sweep);

  const ScheduleEntry& last = entries.back();
  const std::uint64_t a = pivotal_threshold(last, cfg.threshold_rule(), cfg.a.value_or(1));
  // The sweep's last entry already simulated the trajectories for this function.
  to.stream_base = 3 * kSectionStride;
  const auto f = build(last);
  const auto bc =
      dyn::pivotal_bound_check(*f, a, dc, ctx.samples(), to, report.entries.back().distribution.p_zero());
  ctx.check("bound/k=" + std::to_string(last.k), 9, bc.holds,
            "P[C=0]=" + format_number(bc.p_zero_changes.point) + " <= eps + exp(-(1-eps)a) = " +
                format_number(bc.bound) + " with a=" + std::to_string(a) + ", eps=" + format_number(bc.eps) +
                ", margin " + format_number(bc.margin));
  out::Table bound({"family", "k", "l", "n", "a", "p_small_pivotal", "p_small_pivotal_stderr", "eps", "bound",
                    "bound_stderr", "p_c0", "p_c0_stderr", "margin", "holds", "seed"});
  bound.add_row({family_name(*f), last.k, last.l, f->arity(), a, bc.p_small_pivotal.point,
                 bc.p_small_pivotal.std_error, bc.eps, bc.bound, bc.bound_std_error, bc.p_zero_changes.point,
                 bc.p_zero_changes.std_error, bc.margin, bc.holds, cfg.seed});
  ctx.file("volatility_bound", bound);
}

void finish(const Context& ctx) {
  SuiteResult& r = ctx.result;
  nlohmann::ordered_json verdict;
  const auto meta = ctx.cfg.meta();
  verdict["suite"] = r.suite;
  verdict["passed"] = r.passed();
  verdict["meta"] = {{"version", meta.tool_version}, {"seed", meta.seed}, {"config_hash", meta.config_hash}};
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"criterion", c.criterion}, {"passed", c.passed}, {"detail", c.detail}});
  }
  verdict["checks"] = std::move(checks);
  std::ostringstream summary;
  summary << "# pivotal-lab " << meta.tool_version << " seed=" << meta.seed << " config_hash=" << meta.config_hash
          << "\n";
  summary << "suite " << r.suite << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : r.checks) {
    summary << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  r.files.push_back({"verdict.json", verdict.dump(2) + "\n"});
  r.files.push_back({"summary.txt", summary.str()});
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<const Check*> SuiteResult::failures() const {
  std::vector<const Check*> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(&c);
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"marginals", "sandwich", "bribable",
                                                 "stability", "pivotal-abundance", "volatility"};
  return names;
}

SuiteResult run_suite(std::string_view name, const ExperimentConfig& cfg) { return run_suite(name, cfg, Overrides{}); }

SuiteResult run_suite(std::string_view name, const ExperimentConfig& cfg, const Overrides& overrides) {
  cfg.validate();
  SuiteResult result;
  result.suite = std::string(name);
  Context ctx{cfg, overrides, result};
  if (name == "marginals") {
    suite_marginals(ctx);
  } else if (name == "sandwich") {
    suite_sandwich(ctx);
  } else if (name == "bribable") {
    suite_bribable(ctx);
  } else if (name == "stability") {
    suite_stability(ctx);
  } else if (name == "pivotal-abundance") {
    suite_pivotal_abundance(ctx);
  } else if (name == "volatility") {
    suite_volatility(ctx);
  } else {
    std::string known;
    for (const auto& s : suite_names()) known += (known.empty() ? "" : "|") + s;
    throw UsageError("unknown suite '" + std::string(name) + "' (" + known + ")");
  }
  finish(ctx);
  return result;
}

}  // namespace pivlab::repro
