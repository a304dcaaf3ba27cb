#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pivotal_lab/constructions.hpp"
#include "pivotal_lab/dynamics.hpp"
#include "pivotal_lab/output.hpp"

namespace pivlab {

/// Parameters shared by every subcommand. Config files are either a flat JSON
/// object (the canonical form) or `key = value` lines with '#' comments;
/// command-line flags override file values. Lists are JSON arrays or
/// comma-separated text; k may also be given as exponents via `j` ("10..14",
/// "10,12,14").
struct ExperimentConfig {
  std::string family = "bribed";
  std::optional<std::uint64_t> n;
  std::uint64_t coordinate = 0;  // dictator
  int value = 1;                 // constant
  std::string tie = "plus";
  std::optional<std::uint64_t> l;
  std::vector<std::uint64_t> k;
  double p = 0.5;
  std::vector<double> epsilon;
  std::uint64_t samples = 100000;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: PIVOTAL_LAB_THREADS, else 1
  std::string out;
  out::Format format = out::Format::Csv;
  std::vector<std::string> reports;
  std::vector<std::string> quantities;
  dyn::Semantics semantics = dyn::Semantics::Flip;
  double duration = 1.0;
  std::string rounding = "ceil";
  std::string threshold = "half-mean";
  std::optional<std::uint64_t> a;

  /// Accepts one key from a config file or flag; unknown keys are rejected.
  void set(std::string_view key, const nlohmann::json& value);
  void apply(const nlohmann::json& flat_object);
  /// Range checks; throws UsageError.
  void validate() const;

  /// Canonical form used for the provenance hash: excludes threads and out,
  /// which must not change results.
  nlohmann::ordered_json canonical() const;
  out::Meta meta() const;
  unsigned effective_threads() const;

  Rounding rounding_rule() const;
  ThresholdRule threshold_rule() const;
  TieRule tie_rule() const;
};

/// JSON object or `key = value` lines -> flat JSON object of raw values.
nlohmann::json parse_config_text(std::string_view text);
ExperimentConfig load_config_file(const std::string& path);

std::vector<std::uint64_t> parse_exponent_list(std::string_view text);

/// Tribes parameters for the family at one k: l from the override or from
/// the schedule.
TribesParams tribes_params_for(const ExperimentConfig& cfg, std::uint64_t k);
ScheduleEntry schedule_entry_for(const ExperimentConfig& cfg, std::uint64_t k);
/// The configured function; `k` selects the entry for tribes-built families.
FunctionPtr build_function(const ExperimentConfig& cfg, std::optional<std::uint64_t> k = std::nullopt);
bool is_tribes_family(std::string_view family) noexcept;

}  // namespace pivlab
