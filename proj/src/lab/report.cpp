#include "mixlab/lab/report.hpp"

#include "mixlab/error.hpp"

#include <filesystem>
#include <fstream>

#ifndef MIXLAB_VERSION
#define MIXLAB_VERSION "0.0.0"
#endif

namespace mixlab::lab {

std::string tool_version() { return MIXLAB_VERSION; }

Json verdict_json(const duhamel::RunVerdict& v) {
    return {{"kind", duhamel::verdict_name(v.kind)},
            {"time", v.time},
            {"sup", v.sup},
            {"decay_slope", v.decay_slope},
            {"reason", v.reason}};
}

Json verdict_json(const duhamel::RunResult& run, const Json& config) {
    Json j = verdict_json(run.verdict);
    j["diagnostics"] = {{"threshold", run.threshold},
                        {"max_boundary_fraction", run.max_boundary_fraction},
                        {"forced", run.forced},
                        {"forcing_integral", run.forcing_integral},
                        {"forcing_positive", run.forcing_positive},
                        {"refined_final_sup", run.refined_final_sup ? Json(*run.refined_final_sup) : Json(nullptr)},
                        {"samples", run.trajectory.t.size()}};
    j["config"] = config;
    return j;
}

void write_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError(path, "write failed");
}

void emit_report(const std::string& out_dir, const std::string& command, const Json& config,
                 const std::vector<RunArtifact>& runs, const Json& extra, double wall_seconds) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError(out_dir, "cannot create output directory: " + ec.message());
    Json list = Json::array();
    for (const auto& r : runs) {
        const auto base = (std::filesystem::path(out_dir) / r.name).string();
        Json entry = {{"name", r.name}, {"verdict", r.verdict.value("kind", "")}};
        if (r.series) {
            duhamel::write_trajectory_csv(*r.series, base + ".csv");
            entry["series"] = r.name + ".csv";
        }
        write_json(r.verdict, base + ".verdict.json");
        entry["verdict_file"] = r.name + ".verdict.json";
        list.push_back(entry);
    }
    Json summary = {{"tool", "lab"},
                    {"version", tool_version()},
                    {"command", command},
                    {"config", config},
                    {"wall_clock_seconds", wall_seconds},
                    {"run_count", runs.size()},
                    {"runs", list},
                    {"results", extra}};
    write_json(summary, (std::filesystem::path(out_dir) / "summary.json").string());
}

}  // namespace mixlab::lab
