#include "pivotal_lab/core.hpp"

#include <algorithm>
#include <bit>
#include <deque>

#include "pivotal_lab/random.hpp"

namespace pivlab {

Value value_from_int(int v) {
  if (v < -1 || v > 1) throw UsageError("value must be -1, 0 or +1, got " + std::to_string(v));
  return static_cast<Value>(v);
}

std::string_view to_string(Codomain c) noexcept {
  switch (c) {
    case Codomain::Boolean: return "boolean";
    case Codomain::ZeroOne: return "zero-one";
    case Codomain::Ternary: return "ternary";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Configuration

Configuration::Configuration(std::size_t n) : n_(n), words_((n + kWordBits - 1) / kWordBits, 0) {}

Configuration Configuration::all_plus(std::size_t n) {
  Configuration c(n);
  std::fill(c.words_.begin(), c.words_.end(), ~std::uint64_t{0});
  c.clear_padding();
  return c;
}

Configuration Configuration::parse(std::string_view text) {
  Configuration c(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+') {
      c.set(i, true);
    } else if (text[i] != '-') {
      throw UsageError("configuration text may only contain '+' and '-'");
    }
  }
  return c;
}

Configuration Configuration::from_code(std::size_t n, std::uint64_t code) {
  if (n > kWordBits) throw UsageError("from_code requires n <= 64");
  Configuration c(n);
  if (n > 0) {
    c.words_[0] = code;
    c.clear_padding();
  }
  return c;
}

void Configuration::check_index(std::size_t i) const {
  if (i >= n_) {
    throw UsageError("coordinate " + std::to_string(i) + " out of range for n=" + std::to_string(n_));
  }
}

bool Configuration::is_plus(std::size_t i) const {
  check_index(i);
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
}

void Configuration::set(std::size_t i, bool plus) {
  check_index(i);
  const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (plus) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

void Configuration::flip_in_place(std::size_t i) {
  check_index(i);
  words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits);
}

void Configuration::negate_in_place() noexcept {
  for (auto& w : words_) w = ~w;
  clear_padding();
}

void Configuration::clear_padding() noexcept {
  const std::size_t tail = n_ % kWordBits;
  if (tail != 0) words_.back() &= (std::uint64_t{1} << tail) - 1;
}

std::size_t Configuration::count_plus() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::size_t Configuration::count_plus(std::size_t start, std::size_t len) const {
  if (start > n_ || len > n_ - start) throw UsageError("coordinate range out of bounds");
  std::size_t total = 0;
  std::size_t pos = start;
  const std::size_t end = start + len;
  while (pos < end) {
    const std::size_t word = pos / kWordBits;
    const std::size_t offset = pos % kWordBits;
    const std::size_t take = std::min(kWordBits - offset, end - pos);
    std::uint64_t bits = words_[word] >> offset;
    if (take < kWordBits) bits &= (std::uint64_t{1} << take) - 1;
    total += static_cast<std::size_t>(std::popcount(bits));
    pos += take;
  }
  return total;
}

std::uint64_t Configuration::code() const {
  if (n_ > kWordBits) throw UsageError("code() requires n <= 64");
  return words_.empty() ? 0 : words_[0];
}

std::string Configuration::to_string() const {
  std::string s(n_, '-');
  for (std::size_t i = 0; i < n_; ++i) {
    if (is_plus(i)) s[i] = '+';
  }
  return s;
}

Configuration flip(Configuration c, std::size_t i) {
  c.flip_in_place(i);
  return c;
}

Configuration negate(Configuration c) {
  c.negate_in_place();
  return c;
}

std::size_t hamming_distance(const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) throw UsageError("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t w = 0; w < a.words().size(); ++w) {
    d += static_cast<std::size_t>(std::popcount(a.words()[w] ^ b.words()[w]));
  }
  return d;
}

Configuration random_configuration(std::size_t n, RandomStream& rng, double p) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("bias p must lie in (0,1)");
  Configuration c(n);
  if (p == 0.5) {
    for (auto& w : c.words()) w = rng();
  } else {
    BernoulliWords(p).fill(c.words(), rng);
  }
  c.clear_padding();
  return c;
}

Configuration apply_noise(const Configuration& c, double epsilon, RandomStream& rng, double p) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw UsageError("noise epsilon must lie in [0,1]");
  if (!(p > 0.0 && p < 1.0)) throw UsageError("bias p must lie in (0,1)");
  Configuration out = c;
  if (epsilon == 0.0) return out;
  const BernoulliWords resample(epsilon);
  const BernoulliWords fresh(p);
  for (auto& w : out.words()) {
    const std::uint64_t mask = resample(rng);
    const std::uint64_t bits = p == 0.5 ? rng() : fresh(rng);
    w = (w & ~mask) | (bits & mask);
  }
  out.clear_padding();
  return out;
}

// ---------------------------------------------------------------------------
// Permutations

Permutation::Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (auto v : image_) {
    if (v >= image_.size() || seen[v]) throw UsageError("permutation image table is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < n; ++i) image[i] = i;
  return Permutation(std::move(image));
}

Configuration permute(const Configuration& c, const Permutation& sigma) {
  if (c.size() != sigma.size()) throw UsageError("permutation size does not match configuration");
  Configuration out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.is_plus(sigma(i))) out.set(i, true);
  }
  return out;
}

std::vector<std::size_t> orbit(std::size_t n, std::span<const Permutation> gens, std::size_t start) {
  if (start >= n) throw UsageError("orbit start out of range");
  for (const auto& g : gens) {
    if (g.size() != n) throw UsageError("generator size mismatch");
  }
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  std::vector<std::size_t> result;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    result.push_back(i);
    for (const auto& g : gens) {
      const std::size_t j = g(i);
      if (!seen[j]) {
        seen[j] = true;
        queue.push_back(j);
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

bool acts_transitively(std::size_t n, std::span<const Permutation> gens) {
  return n == 0 || orbit(n, gens, 0).size() == n;
}

// ---------------------------------------------------------------------------
// Functions and sessions

void BooleanFunction::check_arity(const Configuration& c) const {
  if (c.size() != arity()) {
    throw UsageError("configuration length " + std::to_string(c.size()) + " does not match arity " +
                     std::to_string(arity()));
  }
}

std::unique_ptr<IncrementalSession> BooleanFunction::make_session() const {
  return std::make_unique<ReevaluatingSession>(*this);
}

std::size_t BooleanFunction::pivotal_count(const Configuration& c) const {
  check_arity(c);
  const Value base = evaluate(c);
  Configuration probe = c;
  std::size_t count = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    probe.flip_in_place(i);
    if (evaluate(probe) != base) ++count;
    probe.flip_in_place(i);
  }
  return count;
}

void ReevaluatingSession::reset(const Configuration& c) {
  config_ = c;
  value_ = f_.evaluate(config_);
}

Value ReevaluatingSession::update(std::size_t i, bool plus) {
  if (config_.is_plus(i) != plus) {
    config_.set(i, plus);
    value_ = f_.evaluate(config_);
  }
  return value_;
}

std::vector<std::size_t> pivotal_set(const BooleanFunction& f, const Configuration& c) {
  if (c.size() != f.arity()) throw UsageError("pivotal_set: arity mismatch");
  const Value base = f.evaluate(c);
  Configuration probe = c;
  std::vector<std::size_t> result;
  for (std::size_t i = 0; i < c.size(); ++i) {
    probe.flip_in_place(i);
    if (f.evaluate(probe) != base) result.push_back(i);
    probe.flip_in_place(i);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Structural checks

namespace {

void require_exhaustive(const BooleanFunction& f, std::size_t cap, const char* what) {
  if (f.arity() > cap) {
    throw UsageError(std::string(what) + ": arity " + std::to_string(f.arity()) +
                     " exceeds exhaustive cap " + std::to_string(cap));
  }
}

std::vector<std::int8_t> tabulate(const BooleanFunction& f) {
  const std::size_t n = f.arity();
  std::vector<std::int8_t> values(std::size_t{1} << n);
  Configuration c(n);
  for (std::uint64_t code = 0; code < values.size(); ++code) {
    if (n > 0) c.words()[0] = code;
    values[code] = static_cast<std::int8_t>(to_int(f.evaluate(c)));
  }
  return values;
}

std::uint64_t permuted_code(std::uint64_t code, const Permutation& sigma) {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    out |= ((code >> sigma(i)) & 1U) << i;
  }
  return out;
}

}  // namespace

MonotonicityReport check_monotone(const BooleanFunction& f, std::size_t cap) {
  require_exhaustive(f, cap, "check_monotone");
  const std::size_t n = f.arity();
  const auto values = tabulate(f);
  for (std::uint64_t code = 0; code < values.size(); ++code) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if ((code & bit) == 0 && values[code | bit] < values[code]) {
        return {false, Configuration::from_code(n, code), i};
      }
    }
  }
  return {};
}

SpotCheck spot_check_monotone(const BooleanFunction& f, std::size_t samples, RandomStream& rng) {
  const std::size_t n = f.arity();
  if (n == 0) return SpotCheck::NoViolationFound;
  for (std::size_t s = 0; s < samples; ++s) {
    Configuration c = random_configuration(n, rng);
    const std::size_t i = rng.uniform_below(n);
    c.set(i, false);
    const Value low = f.evaluate(c);
    c.set(i, true);
    if (to_int(f.evaluate(c)) < to_int(low)) return SpotCheck::Violated;
  }
  return SpotCheck::NoViolationFound;
}

bool check_invariance(const BooleanFunction& f, std::span<const Permutation> gens,
                      const InvarianceOptions& options) {
  const std::size_t n = f.arity();
  for (const auto& g : gens) {
    if (g.size() != n) throw UsageError("check_invariance: generator size does not match arity");
  }
  if (options.mode == CheckMode::Exhaustive) {
    require_exhaustive(f, options.cap, "check_invariance");
    const auto values = tabulate(f);
    for (const auto& g : gens) {
      for (std::uint64_t code = 0; code < values.size(); ++code) {
        if (values[permuted_code(code, g)] != values[code]) return false;
      }
    }
    return true;
  }
  RandomStream rng(options.seed, 0);
  for (std::size_t s = 0; s < options.samples; ++s) {
    const Configuration c = random_configuration(n, rng);
    const Value v = f.evaluate(c);
    for (const auto& g : gens) {
      if (f.evaluate(permute(c, g)) != v) return false;
    }
  }
  return true;
}

}  // namespace pivlab
