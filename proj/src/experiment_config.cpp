#include "pivotal_lab/experiment_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pivlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, const nlohmann::json& v, std::string_view expected) {
  throw UsageError("config key '" + std::string(key) + "': expected " + std::string(expected) + ", got " +
                   v.dump());
}

std::uint64_t parse_u64_text(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t out = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    bad_value(key, std::string(text), "a non-negative integer");
  }
  return out;
}

double parse_double_text(std::string_view key, std::string_view text) {
  text = trim(text);
  // strtod is locale dependent; the "C" locale is never changed by this tool.
  const std::string buf(text);
  char* end = nullptr;
  const double out = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(out)) {
    bad_value(key, buf, "a finite number");
  }
  return out;
}

std::uint64_t to_u64(std::string_view key, const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<long long>() < 0) bad_value(key, v, "a non-negative integer");
    return v.get<std::uint64_t>();
  }
  if (v.is_string()) return parse_u64_text(key, v.get<std::string>());
  bad_value(key, v, "a non-negative integer");
}

double to_double(std::string_view key, const nlohmann::json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_double_text(key, v.get<std::string>());
  bad_value(key, v, "a number");
}

std::string to_str(std::string_view key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  bad_value(key, v, "a string");
}

/// Arrays, comma-separated text, or a single scalar.
std::vector<nlohmann::json> to_items(const nlohmann::json& v) {
  std::vector<nlohmann::json> items;
  if (v.is_array()) {
    for (const auto& x : v) items.push_back(x);
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    for (auto part : split(s, ',')) {
      if (!part.empty()) items.emplace_back(std::string(part));
    }
  } else {
    items.push_back(v);
  }
  return items;
}

}  // namespace

void ExperimentConfig::set(std::string_view key, const nlohmann::json& v) {
  if (key == "family") {
    family = to_str(key, v);
  } else if (key == "n") {
    n = to_u64(key, v);
  } else if (key == "i" || key == "coordinate") {
    coordinate = to_u64(key, v);
  } else if (key == "value") {
    const double x = to_double(key, v);
    if (x != -1 && x != 0 && x != 1) bad_value(key, v, "-1, 0 or 1");
    value = static_cast<int>(x);
  } else if (key == "tie") {
    tie = to_str(key, v);
  } else if (key == "l") {
    l = to_u64(key, v);
  } else if (key == "k") {
    k.clear();
    for (const auto& x : to_items(v)) k.push_back(to_u64(key, x));
  } else if (key == "j") {
    std::vector<std::uint64_t> exps;
    if (v.is_array()) {
      for (const auto& x : v) exps.push_back(to_u64(key, x));
    } else if (v.is_string()) {
      exps = parse_exponent_list(v.get<std::string>());
    } else {
      exps.push_back(to_u64(key, v));
    }
    k.clear();
    for (auto e : exps) {
      if (e > 40) throw UsageError("config key 'j': exponent " + std::to_string(e) + " exceeds 40");
      k.push_back(std::uint64_t{1} << e);
    }
  } else if (key == "p") {
    p = to_double(key, v);
  } else if (key == "epsilon") {
    epsilon.clear();
    for (const auto& x : to_items(v)) epsilon.push_back(to_double(key, x));
  } else if (key == "samples") {
    samples = to_u64(key, v);
  } else if (key == "trials") {
    trials = to_u64(key, v);
  } else if (key == "seed") {
    seed = to_u64(key, v);
  } else if (key == "threads") {
    const auto t = to_u64(key, v);
    if (t > 1024) bad_value(key, v, "at most 1024 threads");
    threads = static_cast<unsigned>(t);
  } else if (key == "out") {
    out = to_str(key, v);
  } else if (key == "format") {
    format = out::format_from_string(to_str(key, v));
  } else if (key == "report") {
    reports.clear();
    for (const auto& x : to_items(v)) reports.push_back(to_str(key, x));
  } else if (key == "quantity") {
    quantities.clear();
    for (const auto& x : to_items(v)) quantities.push_back(to_str(key, x));
  } else if (key == "semantics") {
    semantics = dyn::semantics_from_string(to_str(key, v));
  } else if (key == "duration") {
    duration = to_double(key, v);
  } else if (key == "rounding") {
    rounding = to_str(key, v);
  } else if (key == "threshold") {
    threshold = to_str(key, v);
  } else if (key == "a") {
    a = to_u64(key, v);
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::apply(const nlohmann::json& flat_object) {
  if (!flat_object.is_object()) throw UsageError("config must be a flat object of key/value pairs");
  for (const auto& [key, v] : flat_object.items()) {
    if (v.is_object()) throw UsageError("config key '" + key + "': nested objects are not supported");
    set(key, v);
  }
}

bool is_tribes_family(std::string_view f) noexcept { return f == "tribes" || f == "bribable" || f == "bribed"; }

void ExperimentConfig::validate() const {
  static const std::vector<std::string_view> families = {"tribes", "bribable", "bribed", "majority",
                                                         "dictator", "parity", "constant"};
  if (std::find(families.begin(), families.end(), family) == families.end()) {
    throw UsageError("unknown family '" + family + "' (tribes|bribable|bribed|majority|dictator|parity|constant)");
  }
  if (!(p > 0.0 && p < 1.0)) throw UsageError("p must lie in (0,1), got " + out::format_number(p));
  for (double e : epsilon) {
    if (!(e >= 0.0 && e <= 1.0)) throw UsageError("epsilon must lie in [0,1], got " + out::format_number(e));
  }
  if (samples == 0) throw UsageError("samples must be positive");
  if (trials == 0) throw UsageError("trials must be positive");
  if (!(duration > 0.0)) throw UsageError("duration must be positive");
  if (l && *l == 0) throw UsageError("l must be at least 1");
  for (auto kk : k) {
    if (kk == 0) throw UsageError("k values must be positive");
  }
  (void)rounding_rule();
  (void)threshold_rule();
  (void)tie_rule();
  if (threshold == "explicit" && !a) throw UsageError("threshold 'explicit' needs a value for 'a'");
  if (n && *n == 0) throw UsageError("n must be at least 1");
  if (family == "dictator" && n && coordinate >= *n) {
    throw UsageError("dictator coordinate " + std::to_string(coordinate) + " is outside [0, n)");
  }
}

nlohmann::ordered_json ExperimentConfig::canonical() const {
  nlohmann::ordered_json j;
  j["family"] = family;
  j["n"] = n ? nlohmann::ordered_json(*n) : nlohmann::ordered_json();
  j["coordinate"] = coordinate;
  j["value"] = value;
  j["tie"] = tie;
  j["l"] = l ? nlohmann::ordered_json(*l) : nlohmann::ordered_json();
  j["k"] = k;
  j["p"] = p;
  j["epsilon"] = epsilon;
  j["samples"] = samples;
  j["trials"] = trials;
  j["seed"] = seed;
  j["format"] = std::string(out::extension(format));
  j["report"] = reports;
  j["quantity"] = quantities;
  j["semantics"] = std::string(dyn::to_string(semantics));
  j["duration"] = duration;
  j["rounding"] = rounding;
  j["threshold"] = threshold;
  j["a"] = a ? nlohmann::ordered_json(*a) : nlohmann::ordered_json();
  return j;
}

out::Meta ExperimentConfig::meta() const {
  out::Meta m;
  m.seed = seed;
  m.config_hash = out::config_hash(canonical());
  return m;
}

unsigned ExperimentConfig::effective_threads() const {
  if (threads != 0) return threads;
  if (const char* env = std::getenv("PIVOTAL_LAB_THREADS"); env != nullptr && *env != '\0') {
    const auto t = parse_u64_text("PIVOTAL_LAB_THREADS", env);
    if (t == 0 || t > 1024) throw UsageError("PIVOTAL_LAB_THREADS must be in [1, 1024]");
    return static_cast<unsigned>(t);
  }
  return 1;
}

Rounding ExperimentConfig::rounding_rule() const {
  if (rounding == "ceil") return Rounding::Ceil;
  if (rounding == "round") return Rounding::Round;
  throw UsageError("unknown rounding '" + rounding + "' (ceil|round)");
}

ThresholdRule ExperimentConfig::threshold_rule() const {
  if (threshold == "half-mean") return ThresholdRule::HalfMean;
  if (threshold == "sqrt-mean") return ThresholdRule::SqrtMean;
  if (threshold == "explicit") return ThresholdRule::Explicit;
  throw UsageError("unknown threshold rule '" + threshold + "' (half-mean|sqrt-mean|explicit)");
}

TieRule ExperimentConfig::tie_rule() const {
  if (tie == "plus") return TieRule::Plus;
  if (tie == "error") return TieRule::Error;
  throw UsageError("unknown tie rule '" + tie + "' (plus|error)");
}

nlohmann::json parse_config_text(std::string_view text) {
  const auto body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("config JSON must be an object");
    return j;
  }
  nlohmann::json j = nlohmann::json::object();
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    j[std::string(key)] = std::string(value);
  }
  return j;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  ExperimentConfig cfg;
  cfg.apply(parse_config_text(ss.str()));
  return cfg;
}

std::vector<std::uint64_t> parse_exponent_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (auto part : split(text, ',')) {
    if (part.empty()) continue;
    if (const auto dots = part.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_u64_text("j", part.substr(0, dots));
      const auto hi = parse_u64_text("j", part.substr(dots + 2));
      if (lo > hi) throw UsageError("exponent range '" + std::string(part) + "' is empty");
      for (auto e = lo; e <= hi; ++e) out.push_back(e);
    } else {
      out.push_back(parse_u64_text("j", part));
    }
  }
  if (out.empty()) throw UsageError("empty exponent list");
  return out;
}

ScheduleEntry schedule_entry_for(const ExperimentConfig& cfg, std::uint64_t k) {
  if (cfg.l) return schedule_entry(k, static_cast<std::size_t>(*cfg.l));
  const std::uint64_t ks[] = {k};
  return schedule(ks, cfg.rounding_rule()).front();
}

TribesParams tribes_params_for(const ExperimentConfig& cfg, std::uint64_t k) {
  return schedule_entry_for(cfg, k).params();
}

FunctionPtr build_function(const ExperimentConfig& cfg, std::optional<std::uint64_t> k) {
  if (is_tribes_family(cfg.family)) {
    if (!k) {
      if (cfg.k.size() != 1) throw UsageError("family '" + cfg.family + "' needs exactly one k here");
      k = cfg.k.front();
    }
    const auto params = tribes_params_for(cfg, *k);
    if (cfg.family == "tribes") return tribes(params);
    if (cfg.family == "bribable") return bribable(params);
    if (cfg.tie_rule() == TieRule::Plus) return bribed_majority(params);
    return bribed(majority(params.n(), TieRule::Error), bribable(params));
  }
  std::size_t arity = 0;
  if (cfg.n) {
    arity = static_cast<std::size_t>(*cfg.n);
  } else if (cfg.family == "majority" && cfg.l && (k || cfg.k.size() == 1)) {
    arity = static_cast<std::size_t>(*cfg.l * (k ? *k : cfg.k.front()));
  } else {
    throw UsageError("family '" + cfg.family + "' needs n");
  }
  if (cfg.family == "majority") return majority(arity, cfg.tie_rule());
  if (cfg.family == "dictator") return dictator(arity, static_cast<std::size_t>(cfg.coordinate));
  if (cfg.family == "parity") return parity(arity);
  if (cfg.family == "constant") return constant(arity, value_from_int(cfg.value));
  throw UsageError("unknown family '" + cfg.family + "'");
}

}  // namespace pivlab
