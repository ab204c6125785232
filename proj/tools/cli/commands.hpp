#pragma once

#include "config.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace markup::cli {

enum ExitCode : int { kExitOk = 0, kExitCertificateFailure = 1, kExitConfigError = 2, kExitNumericalError = 3 };

struct Options {
    std::string command;
    std::vector<double> eta;
    std::optional<double> eta_bar;
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<double> tol;
    std::optional<std::size_t> grid;
    std::string format = "csv";
    std::optional<std::string> side;
};

/// One output file. `format` is csv, json or svg.
struct Artifact {
    std::string name;
    std::string format;
    std::string content;
};

struct CommandResult {
    std::vector<Artifact> artifacts;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string first_failure;
};

CommandResult cmd_guarantee(const Options& opts, const ScenarioConfig& cfg);
CommandResult cmd_frontier(const Options& opts, const ScenarioConfig& cfg);
CommandResult cmd_boundary(const Options& opts, const ScenarioConfig& cfg);
CommandResult cmd_verify(const Options& opts, const ScenarioConfig& cfg);
CommandResult cmd_oracle(const Options& opts, const ScenarioConfig& cfg);
CommandResult cmd_procure(const Options& opts, const ScenarioConfig& cfg);
CommandResult cmd_sweep(const Options& opts, const ScenarioConfig& cfg);

/// Dispatches opts.command and writes artifacts: all of the canonical CSV
/// and the requested format into --out, or the requested format to `out`.
/// Returns the process exit code.
int execute(const Options& opts, std::ostream& out, std::ostream& err);

/// Full command line entry point.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace markup::cli
