#pragma once

// Exhaustive small-n engine. Configurations are indexed by their code:
// coordinate i contributes bit i, a set bit meaning +1.

#include <array>
#include <cstdint>
#include <vector>

#include "pivotal_lab/constructions.hpp"
#include "pivotal_lab/core.hpp"

namespace pivlab::exact {

inline constexpr std::size_t kTableCap = 24;
inline constexpr std::size_t kLawCap = 20;
inline constexpr std::size_t kSpectralSampleCap = 16;

struct TruthTable {
  std::size_t n = 0;
  std::vector<Value> values;  // size 2^n

  Value operator[](std::uint64_t code) const { return values[code]; }
  std::uint64_t count(Value v) const;
};

TruthTable truth_table(const BooleanFunction& f, std::size_t cap = kTableCap);

/// coefficient(S) = E[f chi_S] under the uniform measure; S is a bit mask.
struct SpectrumTable {
  std::size_t n = 0;
  std::vector<double> coefficients;

  double operator[](std::uint64_t mask) const { return coefficients[mask]; }
  double total_weight() const;  // sum of squares
};

/// Integer fast Walsh-Hadamard transform followed by an exact 2^-n scaling.
SpectrumTable wht(const TruthTable& t);
/// Spectrum of the indicator 1{f = v}.
SpectrumTable indicator_spectrum(const TruthTable& t, Value v);

/// P_p[f = v] by weighted enumeration; at p = 1/2 this is count / 2^n exactly.
double exact_prob(const TruthTable& t, Value v, double p = 0.5);
double exact_prob(const BooleanFunction& f, Value v, double p = 0.5);

/// P[f(w) != f(N_eps w)] at p = 1/2 via the three-indicator decomposition
/// 1 - sum_v sum_S (1-eps)^|S| hat{1_v}(S)^2. Rejects p != 1/2.
double exact_disagreement(const TruthTable& t, double epsilon, double p = 0.5);
double exact_disagreement(const BooleanFunction& f, double epsilon, double p = 0.5);

/// Inf_i = P[i in pivotal set], as exact counts over 2^n.
struct InfluenceTable {
  std::size_t n = 0;
  std::vector<std::uint64_t> pivotal_counts;

  double influence(std::size_t i) const;
  bool all_equal() const;
};

InfluenceTable influences(const TruthTable& t);
InfluenceTable influences(const BooleanFunction& f);

/// Joint law of (f value, |pivotal set|) as counts over `total` draws (2^n for
/// exact laws, the sample count for empirical histograms).
struct PivotalLaw {
  std::size_t n = 0;
  std::uint64_t total = 0;
  std::array<std::vector<std::uint64_t>, 3> counts;  // index to_int(v)+1, then m

  static PivotalLaw empty(std::size_t n);
  void add(Value v, std::size_t m, std::uint64_t weight = 1);
  void merge(const PivotalLaw& other);

  double probability(Value v, std::size_t m) const;
  std::uint64_t value_count(Value v) const;
  double value_probability(Value v) const;
  /// E[|P| | f = v]; NaN when P[f = v] = 0.
  double conditional_mean(Value v) const;
  double mean() const;
  /// P[|P| > a | f = v].
  double conditional_tail(std::size_t a, Value v) const;
  double tail(std::size_t a) const;
  double total_mass() const;

  friend bool operator==(const PivotalLaw&, const PivotalLaw&) = default;
};

PivotalLaw pivotal_law(const TruthTable& t);
PivotalLaw pivotal_law(const BooleanFunction& f);

/// order 1: values[i] ; order 2: values[i*n + j] (symmetric, diagonal = order 1).
struct MarginalTable {
  std::size_t n = 0;
  int order = 1;
  std::vector<double> values;

  double at(std::size_t i) const { return values.at(i); }
  double at(std::size_t i, std::size_t j) const { return values.at(i * n + j); }
};

/// P[i in S] or P[{i,j} subset of S] for the spectral sample S of a Boolean f.
MarginalTable spectral_marginals(const SpectrumTable& s, int order);
MarginalTable spectral_marginals(const BooleanFunction& f, int order);
/// Same marginals for the pivotal set, by enumeration.
MarginalTable pivotal_marginals(const TruthTable& t, int order);

/// Exhaustive tallies for Tribes(l,k) and the bribable f over all 2^{lk}
/// configurations. X is the number of pivotal tribes (exactly one -1).
struct TribesCounts {
  TribesParams params;
  std::uint64_t configurations = 0;
  std::uint64_t tribes_zero = 0;  // #{T = 0}
  std::uint64_t tribes_one = 0;
  std::uint64_t x_sum_zero = 0;   // sum of X over {T = 0}
  std::uint64_t x_sum_one = 0;
  std::uint64_t pivotal_sum_zero = 0;  // sum of |P_T| over {T = 0}
  std::uint64_t x_equals_pivotal_on_zero = 0;  // configurations in {T=0} with |P_T| = X
  std::uint64_t bribable_zero = 0;  // #{f = 0}
  std::uint64_t witness = 0;        // #{f = 0, U > 0, D > 0}
  std::uint64_t u_sum = 0;          // sum of U (= X) over all configurations

  std::uint64_t x_sum() const { return x_sum_zero + x_sum_one; }
};

TribesCounts tribes_counts(const TribesParams& params, std::size_t cap = kLawCap);

/// Plancherel check helper: sum_S fhat(S) ghat(S).
double spectral_inner_product(const SpectrumTable& a, const SpectrumTable& b);
/// E[f g] by enumeration.
double inner_product(const TruthTable& a, const TruthTable& b);

}  // namespace pivlab::exact
