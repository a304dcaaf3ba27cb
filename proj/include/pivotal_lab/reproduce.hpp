#pragma once

// Canned end-to-end batteries behind `pivotal-lab reproduce <suite>`. Each
// suite returns named pass/fail checks plus the data files it produced; the
// files never contain timings, so they are byte-stable across thread counts.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pivotal_lab/experiment_config.hpp"

namespace pivlab::repro {

struct Check {
  std::string name;
  int criterion = 0;  // acceptance criterion number, 0 for supporting checks
  bool passed = false;
  std::string detail;
};

struct OutputFile {
  std::string name;
  std::string contents;
};

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;
  std::vector<OutputFile> files;  // data tables, then verdict.json and summary.txt
  /// Wall-clock seconds per criterion; reported by callers, never written.
  std::map<int, double> seconds;

  bool passed() const;
  std::vector<const Check*> failures() const;
};

const std::vector<std::string>& suite_names();

/// Suite parameters default to the acceptance sizes; `cfg` overrides seed,
/// threads, samples, trials, k (via k or j), epsilon and, for volatility, the
/// family under test.
SuiteResult run_suite(std::string_view name, const ExperimentConfig& cfg);

/// Which config keys the user set explicitly; suites keep their own defaults
/// for everything else.
struct Overrides {
  bool k = false;
  bool epsilon = false;
  bool samples = false;
  bool trials = false;
  bool family = false;
};

SuiteResult run_suite(std::string_view name, const ExperimentConfig& cfg, const Overrides& overrides);

}  // namespace pivlab::repro
