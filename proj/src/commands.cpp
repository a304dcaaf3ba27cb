#include "pivotal_lab/commands.hpp"

#include <algorithm>
#include <bit>
#include <filesystem>

#include "pivotal_lab/exact.hpp"
#include "pivotal_lab/montecarlo.hpp"

namespace pivlab::cli {

namespace {

constexpr std::uint64_t kGroupStride = std::uint64_t{1} << 40;

OutputFile render(const ExperimentConfig& cfg, std::string stem, const out::Table& t) {
  return {std::move(stem) + "." + std::string(out::extension(cfg.format)), t.render(cfg.format, cfg.meta())};
}

/// (k, l) columns for a function: the tribes parameters, or zeros.
std::pair<std::uint64_t, std::uint64_t> kl_columns(const ExperimentConfig& cfg, std::optional<std::uint64_t> k) {
  if (is_tribes_family(cfg.family) && k) {
    const auto params = tribes_params_for(cfg, *k);
    return {params.k, params.l};
  }
  return {0, 0};
}

/// One k for the tribes-built families, none otherwise.
std::vector<std::optional<std::uint64_t>> k_points(const ExperimentConfig& cfg) {
  std::vector<std::optional<std::uint64_t>> pts;
  if (is_tribes_family(cfg.family)) {
    if (cfg.k.empty()) throw UsageError("family '" + cfg.family + "' needs k (or j)");
    for (auto k : cfg.k) pts.emplace_back(k);
  } else if (cfg.family == "majority" && !cfg.n && cfg.l && !cfg.k.empty()) {
    for (auto k : cfg.k) pts.emplace_back(k);
  } else {
    pts.emplace_back(std::nullopt);
  }
  return pts;
}

}  // namespace

CommandOutput cmd_exact(const ExperimentConfig& cfg) {
  cfg.validate();
  if (is_tribes_family(cfg.family) && cfg.k.size() != 1) throw UsageError("exact needs exactly one k");
  const FunctionPtr f = build_function(cfg);
  std::vector<std::string> reports = cfg.reports;
  if (reports.empty()) reports = {"spectrum", "influences", "pivotal-law", "disagreement"};
  static const std::vector<std::string> known = {"spectrum", "influences", "pivotal-law", "disagreement"};
  for (const auto& r : reports) {
    if (std::find(known.begin(), known.end(), r) == known.end()) {
      throw UsageError("unknown exact report '" + r + "' (spectrum|influences|pivotal-law|disagreement)");
    }
  }
  // Refuse before any work: every report needs the truth table.
  const std::size_t cap = std::find(reports.begin(), reports.end(), "pivotal-law") != reports.end()
                              ? exact::kLawCap
                              : exact::kTableCap;
  if (f->arity() > cap) {
    throw UsageError("arity " + std::to_string(f->arity()) + " exceeds exhaustive cap " + std::to_string(cap));
  }
  const exact::TruthTable table = exact::truth_table(*f);

  CommandOutput result;
  for (const auto& report : reports) {
    if (report == "spectrum") {
      const auto s = exact::wht(table);
      out::Table t({"mask", "size", "coefficient"});
      for (std::uint64_t mask = 0; mask < s.coefficients.size(); ++mask) {
        if (s.coefficients[mask] == 0.0) continue;
        t.add_row({out::hex_mask(mask), std::popcount(mask), s.coefficients[mask]});
      }
      result.files.push_back(render(cfg, "exact_spectrum", t));
    } else if (report == "influences") {
      const auto inf = exact::influences(table);
      out::Table t({"i", "pivotal_count", "influence"});
      for (std::size_t i = 0; i < inf.n; ++i) t.add_row({i, inf.pivotal_counts[i], inf.influence(i)});
      result.files.push_back(render(cfg, "exact_influences", t));
    } else if (report == "pivotal-law") {
      const auto law = exact::pivotal_law(table);
      out::Table t({"value", "m", "count", "joint_probability", "value_probability"});
      for (int v = -1; v <= 1; ++v) {
        const Value val = value_from_int(v);
        for (std::size_t m = 0; m <= law.n; ++m) {
          const auto c = law.counts[static_cast<std::size_t>(v + 1)][m];
          if (c == 0) continue;
          t.add_row({v, m, c, law.probability(val, m), law.value_probability(val)});
        }
      }
      result.files.push_back(render(cfg, "exact_pivotal_law", t));
    } else {
      std::vector<double> eps = cfg.epsilon;
      if (eps.empty()) eps = {0.01, 0.05, 0.1, 0.2, 0.5};
      out::Table t({"epsilon", "disagreement"});
      for (double e : eps) t.add_row({e, exact::exact_disagreement(table, e, cfg.p)});
      result.files.push_back(render(cfg, "exact_disagreement", t));
    }
  }
  return result;
}

CommandOutput cmd_mc(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::string> quantities = cfg.quantities;
  if (quantities.empty()) {
    quantities = is_tribes_family(cfg.family) ? std::vector<std::string>{"p-f-zero", "witness", "mean-u"}
                                              : std::vector<std::string>{"disagreement"};
  }
  static const std::vector<std::string> tribes_quantities = {"p-f-zero", "witness", "p-t-one", "mean-u",
                                                            "u-tail", "pivotal-g-tail", "pivotal-g-nonempty"};
  bool need_tribes = false;
  for (const auto& q : quantities) {
    const bool is_tribes_q = std::find(tribes_quantities.begin(), tribes_quantities.end(), q) != tribes_quantities.end();
    if (!is_tribes_q && q != "disagreement") throw UsageError("unknown mc quantity '" + q + "'");
    if (is_tribes_q && !is_tribes_family(cfg.family)) {
      throw UsageError("quantity '" + q + "' needs a tribes-built family (tribes|bribable|bribed)");
    }
    need_tribes = need_tribes || is_tribes_q;
  }
  std::vector<double> eps = cfg.epsilon;
  if (eps.empty()) eps = {0.1};

  mc::SamplingOptions base;
  base.n_samples = cfg.samples;
  base.seed = cfg.seed;
  base.threads = cfg.effective_threads();
  base.p = cfg.p;

  out::Table table = out::estimate_table();
  const auto points = k_points(cfg);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const auto k = points[pi];
    const auto [kcol, lcol] = kl_columns(cfg, k);
    const std::uint64_t group = pi * 1024;
    std::optional<mc::TribesAggregate> agg;
    std::uint64_t a = 0;
    if (need_tribes) {
      const auto entry = schedule_entry_for(cfg, *k);
      a = pivotal_threshold(entry, cfg.threshold_rule(), cfg.a.value_or(1));
      const std::uint64_t thresholds[] = {a};
      mc::SamplingOptions o = base;
      o.stream_base = group * kGroupStride;
      agg = mc::mc_tribes_stats(entry.params(), o, thresholds);
    }
    FunctionPtr f;
    for (const auto& q : quantities) {
      if (q == "disagreement") {
        if (!f) f = build_function(cfg, k);
        for (std::size_t e = 0; e < eps.size(); ++e) {
          mc::SamplingOptions o = base;
          o.stream_base = (group + 1 + e) * kGroupStride;
          out::add_estimate_row(table, cfg.family, kcol, lcol, cfg.p, eps[e], q, mc::mc_disagreement(*f, eps[e], o));
        }
        continue;
      }
      mc::Estimate est;
      if (q == "p-f-zero") {
        est = agg->p_f_zero();
      } else if (q == "witness") {
        est = agg->p_witness();
      } else if (q == "p-t-one") {
        est = mc::Estimate::binomial(agg->t_plus, agg->n_samples, agg->provenance);
      } else if (q == "mean-u") {
        est = agg->mean_u();
      } else if (q == "u-tail") {
        est = agg->p_u_above(0);
      } else if (q == "pivotal-g-tail") {
        est = agg->p_pivotal_g_above(0);
      } else {
        est = agg->p_pivotal_g_nonempty();
      }
      const std::string label = (q == "u-tail" || q == "pivotal-g-tail") ? q + ">" + std::to_string(a) : q;
      out::add_estimate_row(table, cfg.family, kcol, lcol, cfg.p, 0.0, label, est);
    }
  }
  CommandOutput result;
  result.files.push_back(render(cfg, "mc", table));
  return result;
}

CommandOutput cmd_dynamics(const ExperimentConfig& cfg) {
  cfg.validate();
  dyn::DynamicsConfig dc;
  dc.duration = cfg.duration;
  dc.semantics = cfg.semantics;
  dc.p = cfg.p;
  dc.trials = cfg.trials;
  dc.validate();
  dyn::TrialOptions to;
  to.seed = cfg.seed;
  to.threads = cfg.effective_threads();

  out::Table table = out::dynamics_table();
  const auto points = k_points(cfg);
  std::vector<mc::Estimate> p0;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const auto k = points[pi];
    const auto [kcol, lcol] = kl_columns(cfg, k);
    const FunctionPtr f = build_function(cfg, k);
    to.stream_base = pi * kGroupStride;
    const auto d = dyn::run_trials(*f, dc, to);
    p0.push_back(d.p_zero());
    out::add_dynamics_row(table, cfg.family, kcol, lcol, f->arity(), dc, d);
  }
  CommandOutput result;
  result.files.push_back(render(cfg, "dynamics", table));
  if (p0.size() >= 2) {
    bool decreasing = true;
    for (std::size_t i = 1; i < p0.size(); ++i) decreasing = decreasing && p0[i].point < p0[i - 1].point;
    result.message = std::string("p_c0 strictly decreasing along k: ") + (decreasing ? "yes" : "no");
  }
  return result;
}

CommandOutput cmd_schedule(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<std::uint64_t> ks = cfg.k.empty() ? doubling_range(8, 24) : cfg.k;
  std::vector<ScheduleEntry> entries;
  if (cfg.l) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      entries.push_back(schedule_entry(ks[i], static_cast<std::size_t>(*cfg.l)));
      entries.back().index = i + 1;
    }
  } else {
    entries = schedule(ks, cfg.rounding_rule());
  }
  out::Table table({"n_index", "k", "l", "q0", "mu", "a_n"});
  std::vector<std::string> notes;
  for (const auto& e : entries) {
    table.add_row({e.index, e.k, e.l, e.q0, e.mu, pivotal_threshold(e, cfg.threshold_rule(), cfg.a.value_or(1))});
    if (e.q0_not_increasing) notes.push_back("q0 does not increase at k=" + std::to_string(e.k));
    if (e.mu_not_increasing) notes.push_back("mu does not increase at k=" + std::to_string(e.k));
  }
  CommandOutput result;
  result.files.push_back(render(cfg, "schedule", table));
  for (const auto& n : notes) result.message += (result.message.empty() ? "" : "\n") + n;
  return result;
}

CommandOutput cmd_reproduce(std::string_view suite, const ExperimentConfig& cfg, const repro::Overrides& overrides) {
  const auto r = repro::run_suite(suite, cfg, overrides);
  CommandOutput result;
  result.files = r.files;
  result.exit_code = r.passed() ? kSuccess : kFailure;
  for (const auto* c : r.failures()) {
    result.message += (result.message.empty() ? "" : "\n") + ("failed check " + c->name + ": " + c->detail);
  }
  return result;
}

void emit(const CommandOutput& output, const std::string& out_dir, std::ostream& os) {
  if (out_dir.empty()) {
    for (const auto& f : output.files) os << f.contents;
    return;
  }
  std::filesystem::create_directories(out_dir);
  for (const auto& f : output.files) out::write_file((std::filesystem::path(out_dir) / f.name).string(), f.contents);
}

}  // namespace pivlab::cli
