#include "pivotal_lab/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace pivlab::exact {

namespace {

void require_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) {
    throw UsageError(std::string(what) + ": arity " + std::to_string(n) + " exceeds exhaustive cap " +
                     std::to_string(cap));
  }
}

std::size_t value_index(Value v) { return static_cast<std::size_t>(to_int(v) + 1); }

void integer_wht(std::vector<std::int64_t>& a) {
  for (std::size_t h = 1; h < a.size(); h <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const std::int64_t x = a[j];
        const std::int64_t y = a[j + h];
        a[j] = x + y;
        a[j + h] = x - y;
      }
    }
  }
}

SpectrumTable spectrum_from_integers(std::size_t n, std::vector<std::int64_t> a) {
  // The butterfly yields sum_w f(w) (-1)^{|S & w|} with w read as its set of
  // +1 coordinates, while chi_S(w) picks up a -1 from every coordinate of S
  // at -1: the two differ by (-1)^{|S|}.
  integer_wht(a);
  SpectrumTable s{n, std::vector<double>(a.size())};
  for (std::uint64_t mask = 0; mask < a.size(); ++mask) {
    const std::int64_t signed_sum = (std::popcount(mask) & 1) ? -a[mask] : a[mask];
    s.coefficients[mask] = std::ldexp(static_cast<double>(signed_sum), -static_cast<int>(n));
  }
  return s;
}

double stability_sum(const SpectrumTable& s, double rho) {
  std::vector<double> rho_pow(s.n + 1, 1.0);
  for (std::size_t d = 1; d <= s.n; ++d) rho_pow[d] = rho_pow[d - 1] * rho;
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < s.coefficients.size(); ++mask) {
    const double c = s.coefficients[mask];
    total += rho_pow[static_cast<std::size_t>(std::popcount(mask))] * c * c;
  }
  return total;
}

}  // namespace

std::uint64_t TruthTable::count(Value v) const {
  return static_cast<std::uint64_t>(std::count(values.begin(), values.end(), v));
}

TruthTable truth_table(const BooleanFunction& f, std::size_t cap) {
  const std::size_t n = f.arity();
  require_cap(n, std::min(cap, kTableCap), "truth_table");
  TruthTable t{n, std::vector<Value>(std::size_t{1} << n)};
  Configuration c(n);
  for (std::uint64_t code = 0; code < t.values.size(); ++code) {
    if (n > 0) c.words()[0] = code;
    t.values[code] = f.evaluate(c);
  }
  return t;
}

double SpectrumTable::total_weight() const {
  double total = 0.0;
  for (double c : coefficients) total += c * c;
  return total;
}

SpectrumTable wht(const TruthTable& t) {
  std::vector<std::int64_t> a(t.values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = to_int(t.values[i]);
  return spectrum_from_integers(t.n, std::move(a));
}

SpectrumTable indicator_spectrum(const TruthTable& t, Value v) {
  std::vector<std::int64_t> a(t.values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = t.values[i] == v ? 1 : 0;
  return spectrum_from_integers(t.n, std::move(a));
}

double exact_prob(const TruthTable& t, Value v, double p) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("exact_prob: p must lie in (0,1)");
  if (p == 0.5) return std::ldexp(static_cast<double>(t.count(v)), -static_cast<int>(t.n));
  std::vector<double> weight(t.n + 1);
  for (std::size_t plus = 0; plus <= t.n; ++plus) {
    weight[plus] = std::pow(p, static_cast<double>(plus)) * std::pow(1.0 - p, static_cast<double>(t.n - plus));
  }
  double total = 0.0;
  for (std::uint64_t code = 0; code < t.values.size(); ++code) {
    if (t.values[code] == v) total += weight[static_cast<std::size_t>(std::popcount(code))];
  }
  return total;
}

double exact_prob(const BooleanFunction& f, Value v, double p) { return exact_prob(truth_table(f), v, p); }

double exact_disagreement(const TruthTable& t, double epsilon, double p) {
  if (p != 0.5) throw UsageError("exact_disagreement supports only p = 1/2 (spectral method)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("noise epsilon must lie in [0,1]");
  require_cap(t.n, kLawCap, "exact_disagreement");
  if (epsilon == 0.0) return 0.0;
  const double rho = 1.0 - epsilon;
  double agree = 0.0;
  for (Value v : {Value::Minus, Value::Zero, Value::Plus}) {
    if (t.count(v) == 0) continue;
    agree += stability_sum(indicator_spectrum(t, v), rho);
  }
  return std::max(0.0, 1.0 - agree);
}

double exact_disagreement(const BooleanFunction& f, double epsilon, double p) {
  return exact_disagreement(truth_table(f, kLawCap), epsilon, p);
}

double InfluenceTable::influence(std::size_t i) const {
  return std::ldexp(static_cast<double>(pivotal_counts.at(i)), -static_cast<int>(n));
}

bool InfluenceTable::all_equal() const {
  return std::adjacent_find(pivotal_counts.begin(), pivotal_counts.end(), std::not_equal_to<>()) ==
         pivotal_counts.end();
}

InfluenceTable influences(const TruthTable& t) {
  require_cap(t.n, kExhaustiveCap, "influences");
  InfluenceTable inf{t.n, std::vector<std::uint64_t>(t.n, 0)};
  for (std::uint64_t code = 0; code < t.values.size(); ++code) {
    for (std::size_t i = 0; i < t.n; ++i) {
      if (t.values[code ^ (std::uint64_t{1} << i)] != t.values[code]) ++inf.pivotal_counts[i];
    }
  }
  return inf;
}

InfluenceTable influences(const BooleanFunction& f) { return influences(truth_table(f, kExhaustiveCap)); }

// ---------------------------------------------------------------------------

PivotalLaw PivotalLaw::empty(std::size_t n) {
  PivotalLaw law;
  law.n = n;
  for (auto& row : law.counts) row.assign(n + 1, 0);
  return law;
}

void PivotalLaw::add(Value v, std::size_t m, std::uint64_t weight) {
  counts[value_index(v)].at(m) += weight;
  total += weight;
}

void PivotalLaw::merge(const PivotalLaw& other) {
  if (other.n != n) throw UsageError("PivotalLaw::merge: size mismatch");
  for (std::size_t r = 0; r < counts.size(); ++r) {
    for (std::size_t m = 0; m <= n; ++m) counts[r][m] += other.counts[r][m];
  }
  total += other.total;
}

double PivotalLaw::probability(Value v, std::size_t m) const {
  return static_cast<double>(counts[value_index(v)].at(m)) / static_cast<double>(total);
}

std::uint64_t PivotalLaw::value_count(Value v) const {
  std::uint64_t c = 0;
  for (auto x : counts[value_index(v)]) c += x;
  return c;
}

double PivotalLaw::value_probability(Value v) const {
  return static_cast<double>(value_count(v)) / static_cast<double>(total);
}

double PivotalLaw::conditional_mean(Value v) const {
  const std::uint64_t mass = value_count(v);
  if (mass == 0) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  const auto& row = counts[value_index(v)];
  for (std::size_t m = 0; m <= n; ++m) sum += static_cast<double>(m) * static_cast<double>(row[m]);
  return sum / static_cast<double>(mass);
}

double PivotalLaw::mean() const {
  double sum = 0.0;
  for (const auto& row : counts) {
    for (std::size_t m = 0; m <= n; ++m) sum += static_cast<double>(m) * static_cast<double>(row[m]);
  }
  return sum / static_cast<double>(total);
}

double PivotalLaw::conditional_tail(std::size_t a, Value v) const {
  const std::uint64_t mass = value_count(v);
  if (mass == 0) return std::numeric_limits<double>::quiet_NaN();
  std::uint64_t above = 0;
  const auto& row = counts[value_index(v)];
  for (std::size_t m = a + 1; m <= n; ++m) above += row[m];
  return static_cast<double>(above) / static_cast<double>(mass);
}

double PivotalLaw::tail(std::size_t a) const {
  std::uint64_t above = 0;
  for (const auto& row : counts) {
    for (std::size_t m = a + 1; m <= n; ++m) above += row[m];
  }
  return static_cast<double>(above) / static_cast<double>(total);
}

double PivotalLaw::total_mass() const {
  std::uint64_t c = 0;
  for (const auto& row : counts) {
    for (auto x : row) c += x;
  }
  return static_cast<double>(c) / static_cast<double>(total);
}

PivotalLaw pivotal_law(const TruthTable& t) {
  require_cap(t.n, kLawCap, "pivotal_law");
  PivotalLaw law = PivotalLaw::empty(t.n);
  for (std::uint64_t code = 0; code < t.values.size(); ++code) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < t.n; ++i) {
      if (t.values[code ^ (std::uint64_t{1} << i)] != t.values[code]) ++m;
    }
    law.add(t.values[code], m);
  }
  return law;
}

PivotalLaw pivotal_law(const BooleanFunction& f) { return pivotal_law(truth_table(f, kLawCap)); }

// ---------------------------------------------------------------------------

MarginalTable spectral_marginals(const SpectrumTable& s, int order) {
  if (order != 1 && order != 2) throw UsageError("marginal order must be 1 or 2");
  require_cap(s.n, kSpectralSampleCap, "spectral_marginals");
  const std::size_t n = s.n;
  MarginalTable out{n, order, std::vector<double>(order == 1 ? n : n * n, 0.0)};
  for (std::uint64_t mask = 0; mask < s.coefficients.size(); ++mask) {
    const double w = s.coefficients[mask] * s.coefficients[mask];
    if (w == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (!((mask >> i) & 1U)) continue;
      if (order == 1) {
        out.values[i] += w;
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if ((mask >> j) & 1U) out.values[i * n + j] += w;
      }
    }
  }
  return out;
}

MarginalTable spectral_marginals(const BooleanFunction& f, int order) {
  if (f.codomain() != Codomain::Boolean) {
    throw UsageError("spectral sample is defined only for {-1,1}-valued functions");
  }
  return spectral_marginals(wht(truth_table(f, kSpectralSampleCap)), order);
}

MarginalTable pivotal_marginals(const TruthTable& t, int order) {
  if (order != 1 && order != 2) throw UsageError("marginal order must be 1 or 2");
  require_cap(t.n, kSpectralSampleCap, "pivotal_marginals");
  const std::size_t n = t.n;
  std::vector<std::uint64_t> counts(order == 1 ? n : n * n, 0);
  for (std::uint64_t code = 0; code < t.values.size(); ++code) {
    std::uint64_t piv = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (t.values[code ^ (std::uint64_t{1} << i)] != t.values[code]) piv |= std::uint64_t{1} << i;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!((piv >> i) & 1U)) continue;
      if (order == 1) {
        ++counts[i];
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if ((piv >> j) & 1U) ++counts[i * n + j];
      }
    }
  }
  MarginalTable out{n, order, std::vector<double>(counts.size())};
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.values[i] = std::ldexp(static_cast<double>(counts[i]), -static_cast<int>(n));
  }
  return out;
}

// ---------------------------------------------------------------------------

TribesCounts tribes_counts(const TribesParams& params, std::size_t cap) {
  const std::size_t n = params.n();
  require_cap(n, std::min(cap, kTableCap), "tribes_counts");
  const std::size_t l = params.l;
  const std::uint64_t tribe_mask = (std::uint64_t{1} << l) - 1;

  const auto tribes_at = [&](std::uint64_t code) {
    for (std::size_t t = 0; t < params.k; ++t) {
      if (((code >> (t * l)) & tribe_mask) == tribe_mask) return true;
    }
    return false;
  };

  TribesCounts out{params};
  out.configurations = std::uint64_t{1} << n;
  for (std::uint64_t code = 0; code < out.configurations; ++code) {
    bool full_plus = false;
    bool full_minus = false;
    std::uint64_t x = 0;
    std::uint64_t d = 0;
    for (std::size_t t = 0; t < params.k; ++t) {
      const auto plus = static_cast<std::size_t>(std::popcount((code >> (t * l)) & tribe_mask));
      full_plus = full_plus || plus == l;
      full_minus = full_minus || plus == 0;
      if (plus + 1 == l) ++x;
      if (plus == 1) ++d;
    }
    out.u_sum += x;
    if (full_plus) {
      ++out.tribes_one;
      out.x_sum_one += x;
    } else {
      ++out.tribes_zero;
      out.x_sum_zero += x;
      std::uint64_t pivotal = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (tribes_at(code ^ (std::uint64_t{1} << i))) ++pivotal;
      }
      out.pivotal_sum_zero += pivotal;
      if (pivotal == x) ++out.x_equals_pivotal_on_zero;
    }
    if (full_plus == full_minus) {
      ++out.bribable_zero;
      if (x > 0 && d > 0) ++out.witness;
    }
  }
  return out;
}

double spectral_inner_product(const SpectrumTable& a, const SpectrumTable& b) {
  if (a.n != b.n) throw UsageError("spectral_inner_product: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.coefficients.size(); ++i) total += a.coefficients[i] * b.coefficients[i];
  return total;
}

double inner_product(const TruthTable& a, const TruthTable& b) {
  if (a.n != b.n) throw UsageError("inner_product: size mismatch");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) total += to_int(a.values[i]) * to_int(b.values[i]);
  return std::ldexp(static_cast<double>(total), -static_cast<int>(a.n));
}

}  // namespace pivlab::exact
