#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "mutualsec/io.hpp"

namespace mutualsec::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kInfeasible = 2, kInternal = 3 };

struct CommandOutput {
  int code = kOk;
  json doc;
  std::function<void(io::CsvWriter&)> csv;
  std::vector<std::string> warnings;
};

CommandOutput cmd_design(const RunConfig& cfg);
CommandOutput cmd_mct(const RunConfig& cfg);
CommandOutput cmd_id(const RunConfig& cfg);
CommandOutput cmd_bruteforce(const RunConfig& cfg);
CommandOutput cmd_threshold(const RunConfig& cfg);
CommandOutput cmd_simulate(const RunConfig& cfg);
CommandOutput cmd_sweep(const RunConfig& cfg);

// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mutualsec::cli
