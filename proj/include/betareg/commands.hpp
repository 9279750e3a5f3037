#pragma once

#include "betareg/analysis.hpp"
#include "betareg/config.hpp"
#include "betareg/iterctl.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace betareg {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitFail = 1, kExitConfig = 2, kExitBlowUp = 3 };

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out_dir;  ///< overrides output.dir
  std::optional<double> tol;
  bool quiet = false;
};

/// Everything a run produces, kept in memory so tests can inspect it.
struct RunResult {
  int exit_code = kExitOk;
  ExperimentConfig config;
  std::optional<IterationStack> stack;
  std::optional<ErrorConstants> constants;
  std::vector<BoundVerdict> verdicts;
  std::vector<double> tails;
  bool divergence_observed = false;
  std::optional<double> closed_loop_gap;  ///< sup |e_true - e_n|
  std::string message;
};

/// Runs the configured beta-iteration and evaluates the verdicts without
/// writing files.
RunResult execute_run(const ExperimentConfig& cfg);

/// True when every measured tail is at least the previous one, or the run
/// blew up.
bool divergence_observed(const IterationStack& stack, const std::vector<double>& tails);

void write_trace_csv(std::ostream& os, const IterationStack& stack);

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle(const CommandOptions& opts, std::ostream& out, std::ostream& err);
/// Runs each config (times each beta override) concurrently and writes
/// summary.csv into the output directory.
int cmd_sweep(const std::vector<std::string>& configs, const std::vector<double>& betas, const CommandOptions& opts,
              std::ostream& out, std::ostream& err);

}  // namespace betareg
