#pragma once

// Subcommand bodies of the pivotal-lab tool. Each returns the rendered output
// files; the executable only parses flags and writes them out.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pivotal_lab/experiment_config.hpp"
#include "pivotal_lab/reproduce.hpp"

namespace pivlab::cli {

using repro::OutputFile;

/// Exit-code contract: 0 success, 1 failed check or runtime failure, 2 usage.
enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

struct CommandOutput {
  std::vector<OutputFile> files;
  int exit_code = kSuccess;
  std::string message;  // human-readable result line(s) for stderr
};

/// Reports: spectrum, influences, pivotal-law, disagreement (default: all).
CommandOutput cmd_exact(const ExperimentConfig& cfg);
/// Quantities: disagreement, p-f-zero, witness, p-t-one, mean-u, u-tail,
/// pivotal-g-tail, pivotal-g-nonempty.
CommandOutput cmd_mc(const ExperimentConfig& cfg);
CommandOutput cmd_dynamics(const ExperimentConfig& cfg);
/// Columns n_index,k,l,q0,mu,a_n.
CommandOutput cmd_schedule(const ExperimentConfig& cfg);
CommandOutput cmd_reproduce(std::string_view suite, const ExperimentConfig& cfg, const repro::Overrides& overrides);

/// Writes the files into `out_dir` (created when missing), or concatenates
/// them to `os` when `out_dir` is empty.
void emit(const CommandOutput& output, const std::string& out_dir, std::ostream& os);

}  // namespace pivlab::cli
