#pragma once

#include "mixlab/duhamel.hpp"
#include "mixlab/lab/config.hpp"

#include <string>
#include <vector>

// Run artifacts: a JSON summary per invocation, one series CSV and one
// verdict JSON per trajectory.

namespace mixlab::lab {

std::string tool_version();

/// kind, time, sup, decay_slope, reason, diagnostics, config echo
Json verdict_json(const duhamel::RunResult& run, const Json& config);
Json verdict_json(const duhamel::RunVerdict& verdict);

/// Pretty JSON (keys sorted), trailing newline.
void write_json(const Json& j, const std::string& path);

struct RunArtifact {
    std::string name;  ///< file stem, e.g. "run" or "row_0003"
    Json verdict;
    const duhamel::Trajectory* series = nullptr;
};

/// Writes <out>/<name>.csv and <out>/<name>.verdict.json per run, then
/// <out>/summary.json with the resolved config, tool version, wall clock,
/// the run list and `extra`.  Creates `out` if needed.
void emit_report(const std::string& out_dir, const std::string& command, const Json& config,
                 const std::vector<RunArtifact>& runs, const Json& extra, double wall_seconds);

}  // namespace mixlab::lab
