#pragma once

// Orchestration of one run (or all presets): initial datum, equilibrium
// fits, time integration, monitors, decay fits and the files on disk.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "kaclab/config.hpp"

namespace kaclab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMonitorFailure = 1;
inline constexpr int kExitFailure = 2;

struct ExperimentOutcome {
    int exit_code = kExitOk;
    std::string message;
    std::filesystem::path output_dir;
};

/// Runs one configuration (preset or custom initial datum) and writes
/// timeseries.csv, profiles/, equilibrium.csv and summary.json.
ExperimentOutcome run_experiment(const RunConfig& cfg);

/// Single run or, with all_presets, the five presets concurrently into
/// <output_dir>/preset_<k>. Progress goes to `log`, failures to `err`.
/// Returns the process exit status.
int execute(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Parses arguments, executes and maps failures to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kaclab
