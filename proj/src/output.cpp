#include "pivotal_lab/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pivotal_lab/core.hpp"

namespace pivlab::out {

Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw UsageError("unknown output format '" + std::string(s) + "' (csv|json)");
}

std::string_view extension(Format f) noexcept { return f == Format::Csv ? "csv" : "json"; }

std::string config_hash(const nlohmann::ordered_json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return hex_mask(h).substr(2);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string hex_mask(std::uint64_t mask) {
  char buf[19] = "0x";
  static constexpr char digits[] = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[2 + i] = digits[(mask >> (60 - 4 * i)) & 0xF];
  return std::string(buf, 18);
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<nlohmann::ordered_json> cells) {
  if (cells.size() != columns_.size()) throw std::logic_error("table row width does not match header");
  rows_.push_back(std::move(cells));
}

namespace {

std::string csv_cell(const nlohmann::ordered_json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + '"';
  }
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

std::string Table::render(Format format, const Meta& meta) const {
  if (format == Format::Json) {
    nlohmann::ordered_json doc;
    doc["meta"] = {{"version", meta.tool_version}, {"seed", meta.seed}, {"config_hash", meta.config_hash}};
    doc["columns"] = columns_;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : rows_) {
      nlohmann::ordered_json obj;
      for (std::size_t c = 0; c < columns_.size(); ++c) obj[columns_[c]] = r[c];
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
  }
  std::string text = "# pivotal-lab " + meta.tool_version + " seed=" + std::to_string(meta.seed) +
                     " config_hash=" + meta.config_hash + "\n";
  for (std::size_t c = 0; c < columns_.size(); ++c) text += (c ? "," : "") + columns_[c];
  text += "\n";
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) text += (c ? "," : "") + csv_cell(r[c]);
    text += "\n";
  }
  return text;
}

Table estimate_table() {
  return Table({"family", "k", "l", "p", "epsilon", "quantity", "estimate", "stderr", "ci_lo", "ci_hi",
                "n_samples", "seed"});
}

void add_estimate_row(Table& t, std::string_view family, std::uint64_t k, std::uint64_t l, double p,
                      double epsilon, std::string_view quantity, const mc::Estimate& e) {
  t.add_row({std::string(family), k, l, p, epsilon, std::string(quantity), e.point, e.std_error, e.ci_lo, e.ci_hi,
             e.n_samples, e.provenance.seed});
}

Table dynamics_table() {
  return Table({"family", "k", "l", "n", "semantics", "duration", "trials", "p_c0", "stderr", "mean_C", "q50", "q90",
                "seed"});
}

void add_dynamics_row(Table& t, std::string_view family, std::uint64_t k, std::uint64_t l, std::uint64_t n,
                      const dyn::DynamicsConfig& cfg, const dyn::ChangeDistribution& d) {
  const auto p0 = d.p_zero();
  t.add_row({std::string(family), k, l, n, std::string(dyn::to_string(cfg.semantics)), cfg.duration, d.trials,
             p0.point, p0.std_error, d.mean_changes().point, d.quantile(0.5), d.quantile(0.9), d.provenance.seed});
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << contents;
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace pivlab::out
