#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "wulffspread/config.hpp"

namespace wulffspread {

enum ExitCode { exit_pass = 0, exit_check_failed = 1, exit_config_error = 2 };

struct RunOutcome {
  int exit_code = exit_pass;
  std::string run_dir;
  nlohmann::json summary;
};

/// runs/<YYYYMMDD-HHMMSS>-<subcommand>, with a numeric suffix if taken.
std::string make_run_dir(const std::string& root, const std::string& subcommand);

/// Resolves the config, runs one subcommand and writes config.resolved,
/// summary.json and the per-output files into run_dir (created if needed).
/// The summary is written whatever the outcome.
RunOutcome execute(const std::string& subcommand, const RunConfig& config, const std::string& run_dir,
                   std::ostream& out);

/// Full command line: wulffspread <subcommand> [options].
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wulffspread
