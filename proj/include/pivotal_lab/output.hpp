#pragma once

// Tabular output shared by the CLI and the reproduce suites. Every file starts
// with a provenance line (CSV comment or JSON "meta") and is byte-stable for a
// given configuration and seed.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pivotal_lab/dynamics.hpp"
#include "pivotal_lab/montecarlo.hpp"

namespace pivlab::out {

enum class Format { Csv, Json };

Format format_from_string(std::string_view s);
std::string_view extension(Format f) noexcept;

struct Meta {
  std::string tool_version = PIVOTAL_LAB_VERSION;
  std::uint64_t seed = 0;
  std::string config_hash;  // 16 hex digits
};

/// FNV-1a over the canonical JSON dump.
std::string config_hash(const nlohmann::ordered_json& config);

class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  /// Cells in column order; numbers, strings and booleans are accepted.
  void add_row(std::vector<nlohmann::ordered_json> cells);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return rows_.size(); }

  std::string render(Format format, const Meta& meta) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<nlohmann::ordered_json>> rows_;
};

/// Shortest round-trip decimal form ('.' separator, no locale).
std::string format_number(double x);
std::string hex_mask(std::uint64_t mask);

/// Columns family,k,l,p,epsilon,quantity,estimate,stderr,ci_lo,ci_hi,n_samples,seed.
Table estimate_table();
void add_estimate_row(Table& t, std::string_view family, std::uint64_t k, std::uint64_t l, double p,
                      double epsilon, std::string_view quantity, const mc::Estimate& e);

/// Columns family,k,l,n,semantics,duration,trials,p_c0,stderr,mean_C,q50,q90,seed.
Table dynamics_table();
void add_dynamics_row(Table& t, std::string_view family, std::uint64_t k, std::uint64_t l, std::uint64_t n,
                      const dyn::DynamicsConfig& cfg, const dyn::ChangeDistribution& d);

void write_file(const std::string& path, const std::string& contents);

}  // namespace pivlab::out
