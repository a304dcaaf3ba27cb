// pivotal-lab: exact, Monte Carlo and dynamics experiments on tribes-built
// Boolean functions, plus the reproduce suites.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pivotal_lab/commands.hpp"

namespace {

using pivlab::ExperimentConfig;
namespace cli = pivlab::cli;

// Flags mirror config keys one to one; values are parsed by ExperimentConfig.
struct FlagSpec {
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"seed", "64-bit seed"},
    {"threads", "worker threads (0: PIVOTAL_LAB_THREADS, else 1); never changes results"},
    {"out", "output directory (default: stdout; reproduce: reproduce-<suite>)"},
    {"format", "csv or json"},
    {"family", "tribes|bribable|bribed|majority|dictator|parity|constant"},
    {"n", "arity for majority, dictator, parity, constant"},
    {"i", "dictator coordinate"},
    {"value", "constant value (-1, 0 or 1)"},
    {"tie", "majority tie rule: plus or error"},
    {"l", "tribe size override (default: schedule)"},
    {"k", "number of tribes; comma-separated list allowed"},
    {"j", "k = 2^j; list '10,12' or range '10..14'"},
    {"p", "bias P[w_i = +1]"},
    {"epsilon", "noise levels, comma-separated"},
    {"samples", "Monte Carlo samples"},
    {"trials", "dynamics trajectories"},
    {"report", "exact reports: spectrum,influences,pivotal-law,disagreement"},
    {"quantity", "mc quantities: disagreement,p-f-zero,witness,p-t-one,mean-u,u-tail,pivotal-g-tail,"
                 "pivotal-g-nonempty"},
    {"semantics", "dynamics clock semantics: flip or resample"},
    {"duration", "dynamics time window"},
    {"rounding", "schedule rounding: ceil or round"},
    {"threshold", "pivotal threshold rule: half-mean, sqrt-mean or explicit"},
    {"a", "explicit pivotal threshold"},
};

struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
};

void add_flags(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "config file: flat JSON object or key = value lines");
  for (const auto& spec : kFlags) {
    auto* opt = sub->add_option(std::string("--") + spec.key, flags.values[spec.key], spec.help);
    flags.options.emplace_back(spec.key, opt);
  }
}

/// Config file first, then flags in declaration order.
ExperimentConfig resolve(const Flags& flags, pivlab::repro::Overrides& overrides) {
  ExperimentConfig cfg;
  std::vector<std::string> keys;
  if (!flags.config.empty()) {
    std::ifstream is(flags.config, std::ios::binary);
    if (!is) throw pivlab::UsageError("cannot read config file '" + flags.config + "'");
    std::ostringstream text;
    text << is.rdbuf();
    const auto file = pivlab::parse_config_text(text.str());
    cfg.apply(file);
    for (const auto& item : file.items()) keys.push_back(item.key());
  }
  for (const auto& [key, opt] : flags.options) {
    if (opt->count() == 0) continue;
    cfg.set(key, flags.values.at(key));
    keys.push_back(key);
  }
  for (const auto& key : keys) {
    if (key == "k" || key == "j") overrides.k = true;
    if (key == "epsilon") overrides.epsilon = true;
    if (key == "samples") overrides.samples = true;
    if (key == "trials") overrides.trials = true;
    if (key == "family") overrides.family = true;
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pivotal-lab: pivotal sets, noise stability and volatility of tribes-built functions"};
  app.set_version_flag("--version", std::string(PIVOTAL_LAB_VERSION));
  app.require_subcommand(1);

  Flags exact_flags, mc_flags, dyn_flags, sched_flags, repro_flags;
  auto* exact = app.add_subcommand("exact", "exhaustive spectra, influences, pivotal laws, disagreement");
  add_flags(exact, exact_flags);
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimates with standard errors and Wilson intervals");
  add_flags(mc, mc_flags);
  auto* dynamics = app.add_subcommand("dynamics", "continuous-time dynamics and the change count C");
  add_flags(dynamics, dyn_flags);
  auto* sched = app.add_subcommand("schedule", "the (l, k) schedule with q0, mu and a_n");
  add_flags(sched, sched_flags);
  auto* reproduce = app.add_subcommand("reproduce", "run a canned check suite and write a verdict");
  add_flags(reproduce, repro_flags);
  std::string suite;
  reproduce->add_option("suite", suite, "marginals|sandwich|bribable|stability|pivotal-abundance|volatility")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kSuccess : cli::kUsage;
  }

  try {
    pivlab::repro::Overrides overrides;
    cli::CommandOutput output;
    std::string out_dir;
    if (*exact) {
      const auto cfg = resolve(exact_flags, overrides);
      output = cli::cmd_exact(cfg);
      out_dir = cfg.out;
    } else if (*mc) {
      const auto cfg = resolve(mc_flags, overrides);
      output = cli::cmd_mc(cfg);
      out_dir = cfg.out;
    } else if (*dynamics) {
      const auto cfg = resolve(dyn_flags, overrides);
      output = cli::cmd_dynamics(cfg);
      out_dir = cfg.out;
    } else if (*sched) {
      const auto cfg = resolve(sched_flags, overrides);
      output = cli::cmd_schedule(cfg);
      out_dir = cfg.out;
    } else {
      const auto cfg = resolve(repro_flags, overrides);
      output = cli::cmd_reproduce(suite, cfg, overrides);
      out_dir = cfg.out.empty() ? "reproduce-" + suite : cfg.out;
      cli::emit(output, out_dir, std::cout);
      for (const auto& f : output.files) {
        if (f.name == "summary.txt") std::cout << f.contents;
      }
      if (!output.message.empty()) std::cerr << output.message << "\n";
      return output.exit_code;
    }
    cli::emit(output, out_dir, std::cout);
    if (!output.message.empty()) std::cerr << output.message << "\n";
    return output.exit_code;
  } catch (const pivlab::UsageError& e) {
    std::cerr << "pivotal-lab: " << e.what() << "\n";
    return cli::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "pivotal-lab: error: " << e.what() << "\n";
    return cli::kFailure;
  }
}
