#pragma once

#include "qtransport/run_config.hpp"

#include <iosfwd>
#include <string>

/// Batch front end. Subcommands: rates, steady, dynamics, sweep-temperature,
/// sweep-angle, toy-model. Data goes to the configured output (a file, or
/// standard output for "-"); progress goes to the log stream. On failure a
/// one-line JSON object {"status":"error",...} is written to standard output.
namespace qtransport::cli {

/// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_solver = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "QTRANSPORT_OUTPUT_DIR";

/// Runs one subcommand on a resolved configuration. Throws on failure.
void run(const std::string& subcommand, const RunConfig& config, std::ostream& out, std::ostream& log);

/// Full entry point: parses arguments, runs, maps failures to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

/// Output path for a subcommand when run.out is empty: a file in the
/// directory named by QTRANSPORT_OUTPUT_DIR, or "-" when it is unset.
std::string default_output(const std::string& subcommand, const RunConfig& config);

}  // namespace qtransport::cli
