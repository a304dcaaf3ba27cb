#pragma once

// Hypercube configurations, the function-evaluation contract, the noise
// operator, pivotal sets and the structural checkers (monotonicity and
// invariance under a set of coordinate permutations).

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pivlab {

class RandomStream;

/// Raised for caller mistakes: out-of-range indices, arity mismatches,
/// invalid parameters, sizes over an exhaustive cap.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Output of an evaluable function. Boolean functions use {Minus, Plus},
/// the tribes indicator uses {Zero, Plus}.
enum class Value : std::int8_t { Minus = -1, Zero = 0, Plus = 1 };

constexpr int to_int(Value v) noexcept { return static_cast<int>(v); }
Value value_from_int(int v);
inline Value sign_value(bool plus) noexcept { return plus ? Value::Plus : Value::Minus; }

enum class Codomain { Boolean, ZeroOne, Ternary };

std::string_view to_string(Codomain c) noexcept;

/// A point of {-1,+1}^n packed into 64-bit words. Coordinate i lives at word
/// i/64, bit i%64; a set bit means +1. Bits at positions >= n are always zero.
class Configuration {
 public:
  static constexpr std::size_t kWordBits = 64;

  /// All coordinates -1.
  explicit Configuration(std::size_t n = 0);

  static Configuration all_plus(std::size_t n);
  static Configuration all_minus(std::size_t n) { return Configuration(n); }
  /// '+'/'-' characters, coordinate 0 leftmost.
  static Configuration parse(std::string_view text);
  /// Coordinate i is +1 iff bit i of `code` is set. Requires n <= 64.
  static Configuration from_code(std::size_t n, std::uint64_t code);

  std::size_t size() const noexcept { return n_; }

  bool is_plus(std::size_t i) const;
  int sign(std::size_t i) const { return is_plus(i) ? 1 : -1; }
  void set(std::size_t i, bool plus);
  void flip_in_place(std::size_t i);
  void negate_in_place() noexcept;

  std::size_t count_plus() const noexcept;
  /// Number of +1 coordinates in [start, start+len).
  std::size_t count_plus(std::size_t start, std::size_t len) const;

  std::uint64_t code() const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }
  /// Zero the padding bits after direct word writes.
  void clear_padding() noexcept;

  std::string to_string() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  void check_index(std::size_t i) const;

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

Configuration flip(Configuration c, std::size_t i);
Configuration negate(Configuration c);
std::size_t hamming_distance(const Configuration& a, const Configuration& b);

/// Uniform (p = 1/2) or P_p-distributed configuration.
Configuration random_configuration(std::size_t n, RandomStream& rng, double p = 0.5);

/// Resample each coordinate independently with probability `epsilon`; a
/// resampled coordinate is +1 with probability p.
Configuration apply_noise(const Configuration& c, double epsilon, RandomStream& rng,
                          double p = 0.5);

/// Bijection on {0,...,n-1}, stored as its image table.
class Permutation {
 public:
  explicit Permutation(std::vector<std::size_t> image);
  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return image_.size(); }
  std::size_t operator()(std::size_t i) const { return image_.at(i); }
  const std::vector<std::size_t>& image() const noexcept { return image_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> image_;
};

/// The configuration c o sigma: coordinate i takes the value of c at sigma(i).
Configuration permute(const Configuration& c, const Permutation& sigma);

/// Orbit of `start` under the group generated by `gens` (breadth-first closure).
std::vector<std::size_t> orbit(std::size_t n, std::span<const Permutation> gens,
                               std::size_t start = 0);
bool acts_transitively(std::size_t n, std::span<const Permutation> gens);

/// Incremental evaluation state used by the dynamics simulator.
class IncrementalSession {
 public:
  virtual ~IncrementalSession() = default;

  virtual void reset(const Configuration& c) = 0;
  /// Set coordinate i to the given sign and return the new output.
  virtual Value update(std::size_t i, bool plus) = 0;
  virtual Value value() const = 0;
  virtual const Configuration& configuration() const = 0;
};

/// A (possibly ternary-valued) function on {-1,+1}^n.
class BooleanFunction {
 public:
  virtual ~BooleanFunction() = default;

  virtual std::size_t arity() const noexcept = 0;
  virtual Value evaluate(const Configuration& c) const = 0;
  virtual Codomain codomain() const noexcept = 0;
  /// Advisory only; use check_monotone to verify.
  virtual bool declared_monotone() const noexcept { return false; }
  /// {"family": ..., params...}
  virtual nlohmann::json descriptor() const = 0;

  /// Default session re-evaluates the function after every update.
  virtual std::unique_ptr<IncrementalSession> make_session() const;
  /// |pivotal_set(*this, c)|. Families with structure override this.
  virtual std::size_t pivotal_count(const Configuration& c) const;

 protected:
  void check_arity(const Configuration& c) const;
};

using FunctionPtr = std::shared_ptr<const BooleanFunction>;

/// Session that recomputes the output from scratch on every update.
class ReevaluatingSession final : public IncrementalSession {
 public:
  explicit ReevaluatingSession(const BooleanFunction& f) : f_(f) {}

  void reset(const Configuration& c) override;
  Value update(std::size_t i, bool plus) override;
  Value value() const override { return value_; }
  const Configuration& configuration() const override { return config_; }

 private:
  const BooleanFunction& f_;
  Configuration config_;
  Value value_ = Value::Zero;
};

/// { i : f(flip(c,i)) != f(c) }, ascending.
std::vector<std::size_t> pivotal_set(const BooleanFunction& f, const Configuration& c);

inline constexpr std::size_t kExhaustiveCap = 22;

struct MonotonicityReport {
  bool monotone = true;
  /// First decreasing edge: lower endpoint (coordinate at -1) and coordinate.
  std::optional<Configuration> lower;
  std::optional<std::size_t> coordinate;
};

/// Scan every hypercube edge. Throws UsageError when arity exceeds `cap`.
MonotonicityReport check_monotone(const BooleanFunction& f, std::size_t cap = kExhaustiveCap);

enum class SpotCheck { NoViolationFound, Violated };

/// Random edge spot-check for arities over the exhaustive cap. A clean run is
/// inconclusive, not a proof.
SpotCheck spot_check_monotone(const BooleanFunction& f, std::size_t samples, RandomStream& rng);

enum class CheckMode { Exhaustive, Sampled };

struct InvarianceOptions {
  CheckMode mode = CheckMode::Exhaustive;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  std::size_t cap = kExhaustiveCap;
};

bool check_invariance(const BooleanFunction& f, std::span<const Permutation> gens,
                      const InvarianceOptions& options = {});

}  // namespace pivlab
