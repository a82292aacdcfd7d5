#pragma once

#include "qgtlab/cli/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qgtlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitZ2Bound = 4;

struct CommandResult {
    int exitCode = kExitOk;
    std::vector<std::string> files;  // names written inside the output directory
    nlohmann::json report;           // the JSON document (written when json is requested)
};

/// Analytic QGT over the configured grid.
CommandResult cmd_analytic(const RunConfig& cfg, const std::filesystem::path& outDir);
/// Weak-drive Rabi experiments and QGT extraction over the grid and drive sweep.
CommandResult cmd_drive(const RunConfig& cfg, const std::filesystem::path& outDir);
/// Chern numbers, spin Chern number and the Z2 sum; exit code 4 when
/// |C+ + C-| exceeds chern.z2_bound.
CommandResult cmd_chern(const RunConfig& cfg, const std::filesystem::path& outDir);
/// Full-circuit calibration of the Bessel coupling law (and optionally the
/// emergent diamond generator).
CommandResult cmd_circuit(const RunConfig& cfg, const std::filesystem::path& outDir);

/// Command-line entry point: parses arguments, runs the command and maps
/// errors onto exit codes (2 config, 3 numerical, 4 Z2 bound).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qgtlab::cli
