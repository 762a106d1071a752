//---------------------------------------------------------------------------//
/*!
 * \file knt/runner.hpp
 * \brief Batch commands writing CSV tables and JSON metadata sidecars.
 *
 * CSV files have fixed column orders and 17-significant-digit floats, and
 * are written atomically; identical configuration and seed give identical
 * CSV bytes when run single-threaded.
 */
//---------------------------------------------------------------------------//
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "knt/config.hpp"

namespace knt
{
enum ExitCode : int
{
    exit_ok = 0,
    exit_usage = 1,
    exit_config = 2,
    exit_numerical = 3
};

//! Names of the available commands.
std::vector<std::string> command_names();

//! One-paragraph description and CSV schema of a command.
std::string command_help(std::string const& name);

/*!
 * Run a command; errors are mapped to exit codes and reported on \c log.
 * Numerical failures also write diagnostics.json in the output directory.
 */
int run_command(std::string const& name, ExperimentConfig const& config,
                std::ostream& log);

struct SelftestCheck
{
    std::string name;
    double value{0};
    bool passed{false};
};

//! Invariant suite across all modules.
std::vector<SelftestCheck> run_selftest(ExperimentConfig const& config,
                                        std::ostream& log);

}  // namespace knt
