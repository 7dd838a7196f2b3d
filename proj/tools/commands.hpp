#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "run_config.hpp"

namespace stark::cli {

enum ExitCode { exit_ok = 0, exit_config = 1, exit_numerical = 2 };

struct RunResult {
  int status = exit_ok;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> outputs;  // paths written, in order
};

/// Runs cfg.task.command and writes CSV, plot data and the manifest.
RunResult execute(const RunConfig& cfg, const std::vector<std::string>& argv, std::ostream& out);

/// Full command line entry point (argv[0] excluded).
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::string& bytes);
/// Throws std::runtime_error when the file cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace stark::cli
