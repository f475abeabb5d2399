#pragma once

// Subcommands of the cvsense tool. Each command turns a resolved parameter object into
// one or more CSV files; the same object is stored in the manifest so a run can be
// replayed from the manifest alone.

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cvsense/cli/config.hpp"
#include "cvsense/cli/output.hpp"

namespace cvsense::cli {

enum ExitCode : int {
    kExitSuccess = 0,
    kExitUsage = 1,       // bad flags, config or parameter domain
    kExitValidation = 2,  // a statistical or numerical check failed
    kExitSolver = 3,      // optimiser or extrapolation did not converge
};

struct Command {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> schema;
    std::function<RunRecord(const nlohmann::json& params, const std::filesystem::path& out)> run;
};

const std::vector<Command>& commands();
const Command& find_command(std::string_view name);

/// Runs the command, writes its manifest and returns the record.
RunRecord execute(const Command& command, const nlohmann::json& params, const std::filesystem::path& out);

struct ReplayResult {
    std::vector<std::string> mismatches;
    std::vector<std::filesystem::path> outputs;
    bool ok() const { return mismatches.empty(); }
};

/// Re-runs the command recorded in `manifest` into `out_dir` and compares output checksums.
ReplayResult replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

/// Log-spaced integers in [lo, hi], `per_decade` per decade, rounded and de-duplicated;
/// hi is always included.
std::vector<int> log_spaced_nodes(int lo, int hi, int per_decade);

}  // namespace cvsense::cli
