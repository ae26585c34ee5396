#pragma once

#include <filesystem>
#include <string>

#include "runner/config.h"

namespace boussctl::runner {

enum ExitCode : int { kOk = 0, kUsage = 1, kConstraint = 2, kNumerical = 3, kInvariant = 4 };

struct RunOutcome {
  int exit_code = kOk;
  json report;
};

// Runs one subcommand (spectrum, simulate, control, stabilize, verify, sweep)
// with a fully merged config, writing manifest.json, report.json, timing.json
// and the command's data files into `out`. Never throws for numerical or
// input problems; those end up in the report and the exit code.
RunOutcome run(const std::string& command, const json& config, const std::filesystem::path& out);

bool is_command(const std::string& name);

}  // namespace boussctl::runner
