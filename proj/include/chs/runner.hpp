#pragma once
// Executes a configured run against an output directory: VTK snapshots at
// the configured cadence, the per-step diagnostics CSV, the fully resolved
// configuration, and a manifest listing everything needed to reproduce the
// run bit-exactly.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include "chs/config.hpp"
#include "chs/csv.hpp"
#include "chs/version.hpp"
#include "chs/vtk.hpp"

namespace chs {

struct RunOutputs {
    std::filesystem::path directory;
    std::vector<std::string> files;
    RunResult result;
};

inline RunOutputs execute_run(const ParsedConfig& parsed, const std::filesystem::path& out_dir,
                              bool quiet = false, std::ostream& log = std::cerr) {
    const ExperimentConfig& cfg = parsed.config;
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    RunOutputs out;
    out.directory = out_dir;

    auto snapshot_name = [](int step) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "snapshot_%06d.vtk", step);
        return std::string(buf);
    };

    RunHooks hooks;
    hooks.on_snapshot = [&](const Simulation& sim, const DiagnosticsRecord& rec) {
        const std::string name = snapshot_name(sim.state().step);
        write_vtk(sim.mesh(), sim.state(), (out_dir / name).string());
        out.files.push_back(name);
        if (!quiet)
            log << "t = " << rec.time << "  mass = " << rec.total_mass
                << "  energy = " << rec.energy << "  newton = " << rec.newton_iterations
                << "\n";
    };

    bool aborted = false;
    std::string abort_reason;
    Simulation sim(cfg);
    DiagnosticsRecord rec = sim.record();
    out.result.diagnostics.push_back(rec);
    hooks.on_snapshot(sim, rec);
    const int steps = cfg.step_count();
    try {
        for (int m = 1; m <= steps; ++m) {
            sim.advance();
            rec = sim.record();
            out.result.diagnostics.push_back(rec);
            if (m % cfg.run.cadence == 0) hooks.on_snapshot(sim, rec);
        }
    } catch (const Error& e) {
        aborted = true;
        abort_reason = e.what();
    }
    out.result.final_record = out.result.diagnostics.back();
    out.result.warnings = sim.warning_count();

    // flush outputs even when a subsolver aborted the run
    write_diagnostics_csv(out.result.diagnostics, (out_dir / "diagnostics.csv").string());
    out.files.push_back("diagnostics.csv");
    detail::write_text_file((out_dir / "config.resolved.cfg").string(), emit_config(cfg));
    out.files.push_back("config.resolved.cfg");

    // temperature nonnegativity is monitored, never fatal
    for (size_t m = 0; m < out.result.diagnostics.size(); ++m)
        if (out.result.diagnostics[m].theta_min < -1e-6 && !quiet)
            log << "warning: min theta = " << out.result.diagnostics[m].theta_min
                << " below -1e-6 at step " << m << "\n";

    std::string manifest;
    manifest += "chs2d run manifest\n";
    manifest += "version = " + std::string(kVersion) + "\n";
    {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        manifest += "created = " + std::string(buf) + "\n";
    }
    manifest += "seed = " + std::to_string(cfg.init.seed) + "\n";
    manifest += "steps = " + std::to_string(steps) + "\n";
    manifest += "status = " + std::string(aborted ? "aborted" : "completed") + "\n";
    if (aborted) manifest += "abort_reason = " + abort_reason + "\n";
    manifest += "warnings = " + std::to_string(out.result.warnings) + "\n";
    for (const std::string& note : parsed.notes) manifest += "note = " + note + "\n";
    manifest += "config = config.resolved.cfg\n";
    for (const std::string& f : out.files) manifest += "file = " + f + "\n";
    manifest += "file = manifest.txt\n";
    detail::write_text_file((out_dir / "manifest.txt").string(), manifest);
    out.files.push_back("manifest.txt");

    if (aborted) throw SolverError("run aborted (partial outputs in " + out_dir.string() +
                                   "): " + abort_reason);
    return out;
}

}  // namespace chs
