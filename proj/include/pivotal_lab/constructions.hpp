#pragma once

// Function families: dictator, parity, constants, majority, Tribes(l,k), the
// bribable ternary function T(w) - T(-w), the bribed composite, plus the
// (l,k) schedule and pivotal thresholds.

#include <cstdint>
#include <span>
#include <vector>

#include "pivotal_lab/core.hpp"

namespace pivlab {

/// k consecutive tribes of l coordinates each; tribe t owns [t*l, (t+1)*l).
struct TribesParams {
  std::size_t l = 1;
  std::size_t k = 1;

  TribesParams() = default;
  TribesParams(std::size_t tribe_size, std::size_t tribe_count);

  std::size_t n() const noexcept { return l * k; }
  friend bool operator==(const TribesParams&, const TribesParams&) = default;
};

/// Histogram of per-tribe -1 counts: minus_hist[m] = number of tribes with
/// exactly m coordinates at -1. Every tribes-built function (Tribes, the
/// bribable f, and g = Maj bribed by f) is a function of this profile.
struct TribesProfile {
  TribesParams params;
  std::vector<std::uint64_t> minus_hist;  // size l+1
  std::uint64_t plus_count = 0;           // +1 coordinates overall

  std::uint64_t full_plus() const { return minus_hist.front(); }
  std::uint64_t full_minus() const { return minus_hist.back(); }
  /// Tribes with exactly one -1 (one flip away from all +1).
  std::uint64_t up_pivotal() const { return minus_hist[1]; }
  /// Tribes with exactly one +1.
  std::uint64_t down_pivotal() const { return minus_hist[params.l - 1]; }
};

TribesProfile tribes_profile(const TribesParams& params, const Configuration& c);

enum class TieRule { Plus, Error };

/// Which tribes-built function a profile is read through.
enum class TribesKind { Tribes, Bribable, BribedMajority };

Value tribes_value(TribesKind kind, const TribesProfile& profile);
/// Exact |pivotal set| from the profile alone, O(l).
std::size_t tribes_pivotal_count(TribesKind kind, const TribesProfile& profile);

Value majority_value(std::uint64_t plus_count, std::size_t n) noexcept;

// ---------------------------------------------------------------------------
// Families

class Dictator final : public BooleanFunction {
 public:
  Dictator(std::size_t n, std::size_t coordinate);
  std::size_t arity() const noexcept override { return n_; }
  Value evaluate(const Configuration& c) const override;
  Codomain codomain() const noexcept override { return Codomain::Boolean; }
  bool declared_monotone() const noexcept override { return true; }
  nlohmann::json descriptor() const override;

 private:
  std::size_t n_;
  std::size_t coordinate_;
};

class Parity final : public BooleanFunction {
 public:
  explicit Parity(std::size_t n);
  std::size_t arity() const noexcept override { return n_; }
  /// prod_i w_i
  Value evaluate(const Configuration& c) const override;
  Codomain codomain() const noexcept override { return Codomain::Boolean; }
  nlohmann::json descriptor() const override;
  std::unique_ptr<IncrementalSession> make_session() const override;
  std::size_t pivotal_count(const Configuration& c) const override;

 private:
  std::size_t n_;
};

class Constant final : public BooleanFunction {
 public:
  Constant(std::size_t n, Value v);
  std::size_t arity() const noexcept override { return n_; }
  Value evaluate(const Configuration& c) const override;
  Codomain codomain() const noexcept override;
  bool declared_monotone() const noexcept override { return true; }
  nlohmann::json descriptor() const override;
  std::size_t pivotal_count(const Configuration& c) const override;

 private:
  std::size_t n_;
  Value value_;
};

class Majority final : public BooleanFunction {
 public:
  Majority(std::size_t n, TieRule tie);
  std::size_t arity() const noexcept override { return n_; }
  Value evaluate(const Configuration& c) const override;
  Codomain codomain() const noexcept override { return Codomain::Boolean; }
  bool declared_monotone() const noexcept override { return true; }
  nlohmann::json descriptor() const override;
  std::unique_ptr<IncrementalSession> make_session() const override;
  std::size_t pivotal_count(const Configuration& c) const override;

  TieRule tie_rule() const noexcept { return tie_; }

 private:
  std::size_t n_;
  TieRule tie_;
};

/// Shared implementation of Tribes, the bribable f and Maj bribed by f.
class TribesFamily : public BooleanFunction {
 public:
  TribesFamily(TribesParams params, TribesKind kind);

  std::size_t arity() const noexcept override { return params_.n(); }
  Value evaluate(const Configuration& c) const override;
  Codomain codomain() const noexcept override;
  bool declared_monotone() const noexcept override { return true; }
  nlohmann::json descriptor() const override;
  std::unique_ptr<IncrementalSession> make_session() const override;
  std::size_t pivotal_count(const Configuration& c) const override;

  const TribesParams& params() const noexcept { return params_; }
  TribesKind kind() const noexcept { return kind_; }

 private:
  TribesParams params_;
  TribesKind kind_;
};

/// g = h where f = 0, f elsewhere. h must be Boolean-valued.
class Bribed final : public BooleanFunction {
 public:
  Bribed(FunctionPtr base, FunctionPtr bribe);

  std::size_t arity() const noexcept override { return base_->arity(); }
  Value evaluate(const Configuration& c) const override;
  Codomain codomain() const noexcept override { return Codomain::Boolean; }
  bool declared_monotone() const noexcept override;
  nlohmann::json descriptor() const override;
  std::unique_ptr<IncrementalSession> make_session() const override;
  std::size_t pivotal_count(const Configuration& c) const override;

  const FunctionPtr& base() const noexcept { return base_; }
  const FunctionPtr& bribe() const noexcept { return bribe_; }

 private:
  FunctionPtr base_;
  FunctionPtr bribe_;
  // Set when base is Maj (tie -> +1) and bribe is the bribable f; enables
  // the O(l) profile shortcuts.
  std::shared_ptr<const TribesFamily> fast_path_;
};

FunctionPtr dictator(std::size_t n, std::size_t coordinate = 0);
FunctionPtr parity(std::size_t n);
FunctionPtr constant(std::size_t n, Value v);
FunctionPtr majority(std::size_t n, TieRule tie = TieRule::Plus);
/// 1 iff some tribe is all +1, else 0.
FunctionPtr tribes(const TribesParams& params);
/// T(w) - T(-w), values in {-1,0,1}.
FunctionPtr bribable(const TribesParams& params);
FunctionPtr bribed(FunctionPtr base, FunctionPtr bribe);
/// Maj_{lk} (tie -> +1) bribed by bribable(params).
FunctionPtr bribed_majority(const TribesParams& params);

/// Inverse of BooleanFunction::descriptor(). Also accepts the shorthand
/// {"family":"bribed","l":..,"k":..} for Maj bribed by the bribable f.
FunctionPtr make_function(const nlohmann::json& descriptor);

// ---------------------------------------------------------------------------
// Symmetry witnesses

/// sigma: tribe rotation (t,j) -> (t+1 mod k, j); tau: rotation inside tribe 0.
std::vector<Permutation> tribes_generators(const TribesParams& params);
/// i -> i+1 mod n.
Permutation cyclic_shift(std::size_t n);

// ---------------------------------------------------------------------------
// Schedule

enum class Rounding { Ceil, Round };

struct ScheduleEntry {
  std::size_t index = 0;  // 1-based position in the sequence
  std::uint64_t k = 0;
  std::size_t l = 0;
  double q0 = 0.0;  // (1 - 2^-l)^k = P[Tribes = 0]
  double mu = 0.0;  // k l 2^-l = E[#pivotal tribes]
  double log1 = 0.0;  // log2 k - l, should drift to -infinity
  double log2 = 0.0;  // log2 k + log2 l - l, should drift to +infinity
  bool q0_not_increasing = false;  // relative to the previous entry
  bool mu_not_increasing = false;

  TribesParams params() const { return {l, static_cast<std::size_t>(k)}; }
};

/// l = rounding(log2 k + 0.5 log2 log2 k); requires every k >= 4.
std::vector<ScheduleEntry> schedule(std::span<const std::uint64_t> k_values,
                                    Rounding rounding = Rounding::Ceil);
/// Entry for an explicitly chosen l (any k >= 1); no trend flags.
ScheduleEntry schedule_entry(std::uint64_t k, std::size_t l);
std::vector<std::uint64_t> doubling_range(unsigned first_exponent, unsigned last_exponent,
                                          unsigned step = 1);

enum class ThresholdRule { HalfMean, SqrtMean, Explicit };

std::uint64_t pivotal_threshold(const ScheduleEntry& entry, ThresholdRule rule,
                                std::uint64_t explicit_value = 1);

}  // namespace pivlab
