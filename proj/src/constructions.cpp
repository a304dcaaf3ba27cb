#include "pivotal_lab/constructions.hpp"

#include <bit>
#include <cmath>

namespace pivlab {

namespace {

/// Bits [start, start+len) of a packed configuration, len <= 64.
inline std::uint64_t extract_bits(std::span<const std::uint64_t> words, std::size_t start,
                                  std::size_t len) noexcept {
  const std::size_t w = start / 64;
  const std::size_t off = start % 64;
  std::uint64_t bits = words[w] >> off;
  if (off != 0 && off + len > 64) bits |= words[w + 1] << (64 - off);
  if (len < 64) bits &= (std::uint64_t{1} << len) - 1;
  return bits;
}

inline std::size_t tribe_plus_count(const Configuration& c, std::size_t start, std::size_t l) {
  if (l <= 64) return static_cast<std::size_t>(std::popcount(extract_bits(c.words(), start, l)));
  return c.count_plus(start, l);
}

Value counts_value(TribesKind kind, std::uint64_t full_plus, std::uint64_t full_minus,
                   std::uint64_t plus_count, std::size_t n) {
  switch (kind) {
    case TribesKind::Tribes:
      return full_plus > 0 ? Value::Plus : Value::Zero;
    case TribesKind::Bribable:
      return value_from_int(int(full_plus > 0) - int(full_minus > 0));
    case TribesKind::BribedMajority: {
      const int f = int(full_plus > 0) - int(full_minus > 0);
      return f != 0 ? value_from_int(f) : majority_value(plus_count, n);
    }
  }
  return Value::Zero;
}

// Incremental state for every TribesKind: per-tribe -1 counts plus the profile.
class TribesSession final : public IncrementalSession {
 public:
  TribesSession(TribesParams params, TribesKind kind) : params_(params), kind_(kind) {}

  void reset(const Configuration& c) override {
    if (c.size() != params_.n()) throw UsageError("session reset: arity mismatch");
    config_ = c;
    profile_ = tribes_profile(params_, c);
    minus_.assign(params_.k, 0);
    for (std::size_t t = 0; t < params_.k; ++t) {
      minus_[t] = static_cast<std::uint32_t>(params_.l - tribe_plus_count(c, t * params_.l, params_.l));
    }
    value_ = tribes_value(kind_, profile_);
  }

  Value update(std::size_t i, bool plus) override {
    if (config_.is_plus(i) == plus) return value_;
    config_.set(i, plus);
    const std::size_t t = i / params_.l;
    auto& hist = profile_.minus_hist;
    --hist[minus_[t]];
    if (plus) {
      --minus_[t];
      ++profile_.plus_count;
    } else {
      ++minus_[t];
      --profile_.plus_count;
    }
    ++hist[minus_[t]];
    value_ = counts_value(kind_, hist.front(), hist.back(), profile_.plus_count, params_.n());
    return value_;
  }

  Value value() const override { return value_; }
  const Configuration& configuration() const override { return config_; }

 private:
  TribesParams params_;
  TribesKind kind_;
  Configuration config_;
  TribesProfile profile_;
  std::vector<std::uint32_t> minus_;
  Value value_ = Value::Zero;
};

class MajoritySession final : public IncrementalSession {
 public:
  explicit MajoritySession(std::size_t n) : n_(n) {}

  void reset(const Configuration& c) override {
    if (c.size() != n_) throw UsageError("session reset: arity mismatch");
    config_ = c;
    plus_ = c.count_plus();
  }
  Value update(std::size_t i, bool plus) override {
    if (config_.is_plus(i) != plus) {
      config_.set(i, plus);
      plus ? ++plus_ : --plus_;
    }
    return value();
  }
  Value value() const override { return majority_value(plus_, n_); }
  const Configuration& configuration() const override { return config_; }

 private:
  std::size_t n_;
  Configuration config_;
  std::uint64_t plus_ = 0;
};

class ParitySession final : public IncrementalSession {
 public:
  explicit ParitySession(std::size_t n) : n_(n) {}

  void reset(const Configuration& c) override {
    if (c.size() != n_) throw UsageError("session reset: arity mismatch");
    config_ = c;
    minus_odd_ = ((n_ - c.count_plus()) & 1U) != 0;
  }
  Value update(std::size_t i, bool plus) override {
    if (config_.is_plus(i) != plus) {
      config_.set(i, plus);
      minus_odd_ = !minus_odd_;
    }
    return value();
  }
  Value value() const override { return minus_odd_ ? Value::Minus : Value::Plus; }
  const Configuration& configuration() const override { return config_; }

 private:
  std::size_t n_;
  Configuration config_;
  bool minus_odd_ = false;
};

class BribedSession final : public IncrementalSession {
 public:
  BribedSession(std::unique_ptr<IncrementalSession> base, std::unique_ptr<IncrementalSession> bribe)
      : base_(std::move(base)), bribe_(std::move(bribe)) {}

  void reset(const Configuration& c) override {
    base_->reset(c);
    bribe_->reset(c);
  }
  Value update(std::size_t i, bool plus) override {
    base_->update(i, plus);
    bribe_->update(i, plus);
    return value();
  }
  Value value() const override {
    const Value f = bribe_->value();
    return f != Value::Zero ? f : base_->value();
  }
  const Configuration& configuration() const override { return base_->configuration(); }

 private:
  std::unique_ptr<IncrementalSession> base_;
  std::unique_ptr<IncrementalSession> bribe_;
};

std::size_t json_size(const nlohmann::json& d, const char* key) {
  if (!d.contains(key)) throw UsageError(std::string("function descriptor missing '") + key + "'");
  const auto& v = d.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw UsageError(std::string("descriptor field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

// ---------------------------------------------------------------------------

TribesParams::TribesParams(std::size_t tribe_size, std::size_t tribe_count) : l(tribe_size), k(tribe_count) {
  if (l < 1 || k < 1) throw UsageError("tribes parameters need l >= 1 and k >= 1");
}

TribesProfile tribes_profile(const TribesParams& params, const Configuration& c) {
  if (c.size() != params.n()) throw UsageError("tribes_profile: arity mismatch");
  TribesProfile profile{params, std::vector<std::uint64_t>(params.l + 1, 0), c.count_plus()};
  const std::size_t l = params.l;
  for (std::size_t t = 0, start = 0; t < params.k; ++t, start += l) {
    ++profile.minus_hist[l - tribe_plus_count(c, start, l)];
  }
  return profile;
}

Value majority_value(std::uint64_t plus_count, std::size_t n) noexcept {
  return 2 * plus_count >= n ? Value::Plus : Value::Minus;
}

Value tribes_value(TribesKind kind, const TribesProfile& profile) {
  return counts_value(kind, profile.full_plus(), profile.full_minus(), profile.plus_count,
                      profile.params.n());
}

std::size_t tribes_pivotal_count(TribesKind kind, const TribesProfile& profile) {
  const std::size_t l = profile.params.l;
  const std::size_t n = profile.params.n();
  const std::uint64_t fp = profile.full_plus();
  const std::uint64_t fm = profile.full_minus();
  const std::uint64_t pc = profile.plus_count;
  const Value base = counts_value(kind, fp, fm, pc, n);
  std::size_t count = 0;
  for (std::size_t m = 0; m <= l; ++m) {
    const std::uint64_t tribes_with_m = profile.minus_hist[m];
    if (tribes_with_m == 0) continue;
    if (m > 0) {
      // a -1 turns +1: the tribe drops to m-1 minus coordinates
      const Value after = counts_value(kind, fp + (m == 1 ? 1 : 0), fm - (m == l ? 1 : 0), pc + 1, n);
      if (after != base) count += m * tribes_with_m;
    }
    if (m < l) {
      const Value after = counts_value(kind, fp - (m == 0 ? 1 : 0), fm + (m + 1 == l ? 1 : 0), pc - 1, n);
      if (after != base) count += (l - m) * tribes_with_m;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------

Dictator::Dictator(std::size_t n, std::size_t coordinate) : n_(n), coordinate_(coordinate) {
  if (coordinate >= n) throw UsageError("dictator coordinate out of range");
}

Value Dictator::evaluate(const Configuration& c) const {
  check_arity(c);
  return sign_value(c.is_plus(coordinate_));
}

nlohmann::json Dictator::descriptor() const {
  return {{"family", "dictator"}, {"n", n_}, {"i", coordinate_}};
}

Parity::Parity(std::size_t n) : n_(n) {
  if (n < 1) throw UsageError("parity needs n >= 1");
}

Value Parity::evaluate(const Configuration& c) const {
  check_arity(c);
  return ((n_ - c.count_plus()) & 1U) ? Value::Minus : Value::Plus;
}

nlohmann::json Parity::descriptor() const { return {{"family", "parity"}, {"n", n_}}; }

std::unique_ptr<IncrementalSession> Parity::make_session() const {
  return std::make_unique<ParitySession>(n_);
}

std::size_t Parity::pivotal_count(const Configuration& c) const {
  check_arity(c);
  return n_;
}

Constant::Constant(std::size_t n, Value v) : n_(n), value_(v) {}

Value Constant::evaluate(const Configuration& c) const {
  check_arity(c);
  return value_;
}

Codomain Constant::codomain() const noexcept {
  return value_ == Value::Zero ? Codomain::ZeroOne : Codomain::Boolean;
}

nlohmann::json Constant::descriptor() const {
  return {{"family", "constant"}, {"n", n_}, {"value", to_int(value_)}};
}

std::size_t Constant::pivotal_count(const Configuration& c) const {
  check_arity(c);
  return 0;
}

Majority::Majority(std::size_t n, TieRule tie) : n_(n), tie_(tie) {
  if (n < 1) throw UsageError("majority needs n >= 1");
  if (tie == TieRule::Error && n % 2 == 0) {
    throw UsageError("majority with tie rule 'error' needs odd arity, got " + std::to_string(n));
  }
}

Value Majority::evaluate(const Configuration& c) const {
  check_arity(c);
  return majority_value(c.count_plus(), n_);
}

nlohmann::json Majority::descriptor() const {
  return {{"family", "majority"}, {"n", n_}, {"tie", tie_ == TieRule::Plus ? "plus" : "error"}};
}

std::unique_ptr<IncrementalSession> Majority::make_session() const {
  return std::make_unique<MajoritySession>(n_);
}

std::size_t Majority::pivotal_count(const Configuration& c) const {
  check_arity(c);
  const std::uint64_t pc = c.count_plus();
  const Value base = majority_value(pc, n_);
  std::size_t count = 0;
  if (pc > 0 && majority_value(pc - 1, n_) != base) count += pc;
  if (pc < n_ && majority_value(pc + 1, n_) != base) count += n_ - pc;
  return count;
}

TribesFamily::TribesFamily(TribesParams params, TribesKind kind) : params_(params), kind_(kind) {}

Value TribesFamily::evaluate(const Configuration& c) const {
  check_arity(c);
  const std::size_t l = params_.l;
  bool full_plus = false;
  bool full_minus = false;
  for (std::size_t t = 0, start = 0; t < params_.k; ++t, start += l) {
    const std::size_t plus = tribe_plus_count(c, start, l);
    full_plus = full_plus || plus == l;
    full_minus = full_minus || plus == 0;
    if (full_plus && (kind_ == TribesKind::Tribes || full_minus)) break;
  }
  const std::uint64_t pc = kind_ == TribesKind::BribedMajority ? c.count_plus() : 0;
  return counts_value(kind_, full_plus, full_minus, pc, params_.n());
}

Codomain TribesFamily::codomain() const noexcept {
  switch (kind_) {
    case TribesKind::Tribes: return Codomain::ZeroOne;
    case TribesKind::Bribable: return Codomain::Ternary;
    case TribesKind::BribedMajority: return Codomain::Boolean;
  }
  return Codomain::Ternary;
}

nlohmann::json TribesFamily::descriptor() const {
  switch (kind_) {
    case TribesKind::Tribes:
      return {{"family", "tribes"}, {"l", params_.l}, {"k", params_.k}};
    case TribesKind::Bribable:
      return {{"family", "bribable"}, {"l", params_.l}, {"k", params_.k}};
    case TribesKind::BribedMajority:
      break;
  }
  return {{"family", "bribed"},
          {"base", Majority(params_.n(), TieRule::Plus).descriptor()},
          {"bribe", {{"family", "bribable"}, {"l", params_.l}, {"k", params_.k}}}};
}

std::unique_ptr<IncrementalSession> TribesFamily::make_session() const {
  return std::make_unique<TribesSession>(params_, kind_);
}

std::size_t TribesFamily::pivotal_count(const Configuration& c) const {
  return tribes_pivotal_count(kind_, tribes_profile(params_, c));
}

Bribed::Bribed(FunctionPtr base, FunctionPtr bribe) : base_(std::move(base)), bribe_(std::move(bribe)) {
  if (!base_ || !bribe_) throw UsageError("bribed: null function");
  if (base_->arity() != bribe_->arity()) throw UsageError("bribed: base and bribe arities differ");
  if (base_->codomain() != Codomain::Boolean) throw UsageError("bribed: base must be {-1,1}-valued");
  const auto* maj = dynamic_cast<const Majority*>(base_.get());
  const auto* tf = dynamic_cast<const TribesFamily*>(bribe_.get());
  if (maj != nullptr && maj->tie_rule() == TieRule::Plus && tf != nullptr && tf->kind() == TribesKind::Bribable) {
    fast_path_ = std::make_shared<TribesFamily>(tf->params(), TribesKind::BribedMajority);
  }
}

Value Bribed::evaluate(const Configuration& c) const {
  const Value f = bribe_->evaluate(c);
  return f != Value::Zero ? f : base_->evaluate(c);
}

bool Bribed::declared_monotone() const noexcept {
  return base_->declared_monotone() && bribe_->declared_monotone();
}

nlohmann::json Bribed::descriptor() const {
  return {{"family", "bribed"}, {"base", base_->descriptor()}, {"bribe", bribe_->descriptor()}};
}

std::unique_ptr<IncrementalSession> Bribed::make_session() const {
  if (fast_path_) return fast_path_->make_session();
  return std::make_unique<BribedSession>(base_->make_session(), bribe_->make_session());
}

std::size_t Bribed::pivotal_count(const Configuration& c) const {
  if (fast_path_) return fast_path_->pivotal_count(c);
  return BooleanFunction::pivotal_count(c);
}

// ---------------------------------------------------------------------------

FunctionPtr dictator(std::size_t n, std::size_t coordinate) { return std::make_shared<Dictator>(n, coordinate); }
FunctionPtr parity(std::size_t n) { return std::make_shared<Parity>(n); }
FunctionPtr constant(std::size_t n, Value v) { return std::make_shared<Constant>(n, v); }
FunctionPtr majority(std::size_t n, TieRule tie) { return std::make_shared<Majority>(n, tie); }
FunctionPtr tribes(const TribesParams& params) {
  return std::make_shared<TribesFamily>(params, TribesKind::Tribes);
}
FunctionPtr bribable(const TribesParams& params) {
  return std::make_shared<TribesFamily>(params, TribesKind::Bribable);
}
FunctionPtr bribed(FunctionPtr base, FunctionPtr bribe) {
  return std::make_shared<Bribed>(std::move(base), std::move(bribe));
}
FunctionPtr bribed_majority(const TribesParams& params) {
  return bribed(majority(params.n(), TieRule::Plus), bribable(params));
}

FunctionPtr make_function(const nlohmann::json& d) {
  if (!d.is_object() || !d.contains("family") || !d.at("family").is_string()) {
    throw UsageError("function descriptor needs a string 'family'");
  }
  const auto family = d.at("family").get<std::string>();
  if (family == "tribes") return tribes({json_size(d, "l"), json_size(d, "k")});
  if (family == "bribable") return bribable({json_size(d, "l"), json_size(d, "k")});
  if (family == "majority") {
    TieRule tie = TieRule::Plus;
    if (d.contains("tie")) {
      const auto rule = d.at("tie").get<std::string>();
      if (rule == "error") {
        tie = TieRule::Error;
      } else if (rule != "plus") {
        throw UsageError("unknown majority tie rule '" + rule + "'");
      }
    }
    return majority(json_size(d, "n"), tie);
  }
  if (family == "bribed") {
    if (d.contains("base") || d.contains("bribe")) {
      if (!d.contains("base") || !d.contains("bribe")) throw UsageError("bribed descriptor needs base and bribe");
      return bribed(make_function(d.at("base")), make_function(d.at("bribe")));
    }
    return bribed_majority({json_size(d, "l"), json_size(d, "k")});
  }
  if (family == "dictator") return dictator(json_size(d, "n"), d.contains("i") ? json_size(d, "i") : 0);
  if (family == "parity") return parity(json_size(d, "n"));
  if (family == "constant") {
    const int v = d.contains("value") ? d.at("value").get<int>() : 1;
    return constant(json_size(d, "n"), value_from_int(v));
  }
  throw UsageError("unknown function family '" + family + "'");
}

// ---------------------------------------------------------------------------

std::vector<Permutation> tribes_generators(const TribesParams& params) {
  const std::size_t l = params.l;
  const std::size_t k = params.k;
  std::vector<std::size_t> sigma(params.n());
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t j = 0; j < l; ++j) sigma[t * l + j] = ((t + 1) % k) * l + j;
  }
  std::vector<std::size_t> tau(params.n());
  for (std::size_t i = 0; i < params.n(); ++i) tau[i] = i;
  for (std::size_t j = 0; j < l; ++j) tau[j] = (j + 1) % l;
  return {Permutation(std::move(sigma)), Permutation(std::move(tau))};
}

Permutation cyclic_shift(std::size_t n) {
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < n; ++i) image[i] = (i + 1) % n;
  return Permutation(std::move(image));
}

ScheduleEntry schedule_entry(std::uint64_t k, std::size_t l) {
  if (k < 1 || l < 1) throw UsageError("schedule entry needs k >= 1 and l >= 1");
  ScheduleEntry e;
  e.index = 1;
  e.k = k;
  e.l = l;
  const double lg = std::log2(static_cast<double>(k));
  const double tail = std::ldexp(1.0, -static_cast<int>(l));
  e.q0 = std::exp(static_cast<double>(k) * std::log1p(-tail));
  e.mu = static_cast<double>(k) * static_cast<double>(l) * tail;
  e.log1 = lg - static_cast<double>(l);
  e.log2 = lg + std::log2(static_cast<double>(l)) - static_cast<double>(l);
  return e;
}

std::vector<ScheduleEntry> schedule(std::span<const std::uint64_t> k_values, Rounding rounding) {
  std::vector<ScheduleEntry> entries;
  entries.reserve(k_values.size());
  for (std::size_t idx = 0; idx < k_values.size(); ++idx) {
    const std::uint64_t k = k_values[idx];
    if (k < 4) throw UsageError("schedule needs every k >= 4, got " + std::to_string(k));
    const double lg = std::log2(static_cast<double>(k));
    const double real_l = lg + 0.5 * std::log2(lg);
    const double rounded = rounding == Rounding::Ceil ? std::ceil(real_l) : std::round(real_l);
    ScheduleEntry e = schedule_entry(k, static_cast<std::size_t>(std::max(1.0, rounded)));
    e.index = idx + 1;
    if (!entries.empty() && k > entries.back().k) {
      e.q0_not_increasing = !(e.q0 > entries.back().q0);
      e.mu_not_increasing = !(e.mu > entries.back().mu);
    }
    entries.push_back(e);
  }
  return entries;
}

std::vector<std::uint64_t> doubling_range(unsigned first_exponent, unsigned last_exponent, unsigned step) {
  if (step == 0 || last_exponent > 62) throw UsageError("invalid doubling range");
  std::vector<std::uint64_t> ks;
  for (unsigned j = first_exponent; j <= last_exponent; j += step) ks.push_back(std::uint64_t{1} << j);
  return ks;
}

std::uint64_t pivotal_threshold(const ScheduleEntry& entry, ThresholdRule rule, std::uint64_t explicit_value) {
  if (!(entry.mu > 0.0)) throw UsageError("pivotal_threshold needs mu > 0");
  switch (rule) {
    case ThresholdRule::HalfMean:
      return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(entry.mu / 2.0)));
    case ThresholdRule::SqrtMean:
      return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(std::sqrt(entry.mu))));
    case ThresholdRule::Explicit:
      if (explicit_value < 1) throw UsageError("explicit pivotal threshold must be >= 1");
      return explicit_value;
  }
  return 1;
}

}  // namespace pivlab
