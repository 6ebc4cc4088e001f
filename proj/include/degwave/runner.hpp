#pragma once

#include <string>

namespace degwave::cli {

/// Executes one subcommand against a config file and writes its artifacts.
/// Subcommands: solve, hardy, carleman-scan, observability, hum, steer,
/// validate. Exit codes: 0 success, 2 validation failure, 3 non-convergence,
/// 4 instability.
int run(const std::string& subcommand, const std::string& config_path,
        const std::string& output_override = "");

}  // namespace degwave::cli
