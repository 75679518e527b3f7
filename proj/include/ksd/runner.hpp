#pragma once

// Configuration-driven experiment runner behind the CLI: estimator tables,
// oracle evaluation, the identity suite, convergence sweeps and comparison
// tables, with CSV results and a JSON manifest per run.

#include "ksd/config.hpp"

#include <string>

namespace ksd {

struct CommandResult {
    int exit_code = 0;        // 0 ok, 3 gate breach (with assert)
    std::string csv;          // results table
    std::string manifest;     // JSON manifest
    std::string profile_csv;  // PDE profile, oracle subcommand with oracle = pde
    double order = 0.0;       // convergence sweeps only
    bool gates_ok = true;
};

/// cmd: value | deriv | oracle | check | convergence | compare.
/// Throws ConfigError for invalid configurations (CLI maps it to exit 2).
CommandResult run_command(const std::string& cmd, const RunConfig& cfg,
                          bool assert_gates);

/// Writes <out_dir>/results.csv (or identities.csv for check) and
/// <out_dir>/manifest.json.
void write_outputs(const CommandResult& res, const RunConfig& cfg,
                   const std::string& cmd);

} // namespace ksd
