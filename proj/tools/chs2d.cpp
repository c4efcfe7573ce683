// chs2d - 2D finite-element solver for temperature-coupled
// Cahn-Hilliard-Stokes flow.
//
// Subcommands:
//   run <config>      execute a configured simulation
//   preset list       show the experiment catalogue
//   preset emit NAME  write a preset as an editable config file
//   mms WHICH         manufactured-solution convergence study
//   check             structural property suite (conservation, decay, ...)

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "chs/config.hpp"
#include "chs/csv.hpp"
#include "chs/mms.hpp"
#include "chs/runner.hpp"
#include "chs/version.hpp"

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail = "") {
    std::cout << (pass ? "PASS  " : "FAIL  ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

int cmd_run(const std::string& config_path, std::string out_dir, long long seed_override,
            int cadence_override, bool quiet) {
    std::ifstream is(config_path);
    if (!is) {
        std::cerr << "error: cannot read config file '" << config_path << "'\n";
        return 1;
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    chs::ParsedConfig parsed = chs::parse_config(ss.str());
    if (seed_override >= 0) {
        parsed.config.init.seed = static_cast<uint64_t>(seed_override);
        parsed.notes.push_back("init.seed overridden on the command line");
    }
    if (cadence_override > 0) {
        parsed.config.run.cadence = cadence_override;
        parsed.notes.push_back("run.cadence overridden on the command line");
    }
    parsed.config.validate();

    if (out_dir.empty()) {
        if (const char* env = std::getenv("CHS2D_OUT")) out_dir = env;
        else out_dir = "runs";
    }
    const std::string stem = std::filesystem::path(config_path).stem().string();
    const auto dir = std::filesystem::path(out_dir) / stem;

    const chs::RunOutputs outputs = chs::execute_run(parsed, dir, quiet);
    const chs::DiagnosticsRecord& fin = outputs.result.final_record;
    if (!quiet)
        std::cout << "completed " << parsed.config.step_count() << " steps in "
                  << outputs.result.wall_seconds << " s\n";
    std::cout << "final: t = " << fin.time << ", mass = " << fin.total_mass
              << ", energy = " << fin.energy << ", warnings = " << outputs.result.warnings
              << "\n";
    std::cout << "outputs in " << dir.string() << " (" << outputs.files.size() << " files)\n";
    return 0;
}

int cmd_preset_list() {
    for (const std::string& name : chs::preset_names())
        std::cout << name << "  -  " << chs::preset_info(name).description << "\n";
    return 0;
}

int cmd_preset_emit(const std::string& name, std::string out_dir) {
    const chs::PresetInfo& info = chs::preset_info(name);
    if (out_dir.empty()) out_dir = ".";
    std::filesystem::create_directories(out_dir);
    const auto path = std::filesystem::path(out_dir) / (name + ".cfg");

    std::string text = "# chs2d experiment preset: " + name + "\n";
    text += "# " + info.description + "\n";
    for (const std::string& note : info.notes) text += "# note: " + note + "\n";
    text += "\n" + chs::emit_config(info.config);
    chs::detail::write_text_file(path.string(), text);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_mms(const std::string& which) {
    auto print_study = [](const char* label, const chs::mms::StudyResult& s,
                          const char* scale_name) {
        std::cout << label << "\n";
        std::cout << "  " << scale_name << "        L2 error\n";
        for (size_t i = 0; i < s.scale.size(); ++i)
            std::cout << "  " << s.scale[i] << "    " << s.errors[i] << "\n";
        std::cout << "  observed order: " << s.order << "\n";
    };

    if (which == "heat") {
        const auto spatial = chs::mms::heat_spatial_study();
        print_study("heat equation, spatial refinement (dt ~ h^2):", spatial, "h");
        const auto temporal = chs::mms::heat_temporal_study();
        print_study("heat equation, time refinement (fixed 32x32 mesh):", temporal, "dt");
        report("heat spatial order >= 1.8", spatial.order >= 1.8, fmt(spatial.order));
        report("heat temporal order >= 0.9", temporal.order >= 0.9, fmt(temporal.order));
    } else if (which == "stokes") {
        const auto s = chs::mms::stokes_study();
        std::cout << "Stokes, spatial refinement:\n  h        u error      p error\n";
        for (size_t i = 0; i < s.scale.size(); ++i)
            std::cout << "  " << s.scale[i] << "    " << s.errors_u[i] << "    "
                      << s.errors_p[i] << "\n";
        std::cout << "  observed orders: u " << s.order_u << ", p " << s.order_p << "\n";
        const auto h = chs::mms::hydrostatic_test();
        report("velocity order >= 2.8", s.order_u >= 2.8, fmt(s.order_u));
        report("pressure order >= 1.8", s.order_p >= 1.8, fmt(s.order_p));
        report("hydrostatic velocity below 1e-8", h.u_inf <= 1e-8, fmt(h.u_inf));
        report("hydrostatic pressure error below 1e-8", h.p_err <= 1e-8, fmt(h.p_err));
    } else if (which == "ch-diffusive") {
        const auto s = chs::mms::ch_diffusive_study();
        print_study("diffusive Cahn-Hilliard, spatial refinement (dt ~ h^2):", s, "h");
        report("order parameter order >= 1.8", s.order >= 1.8, fmt(s.order));
    } else {
        std::cerr << "error: unknown study '" << which
                  << "' (expected heat | stokes | ch-diffusive)\n";
        return 2;
    }
    return g_failures == 0 ? 0 : 1;
}

int cmd_check() {
    using namespace chs;
    {  // mesh structure
        const Mesh m = build_structured_mesh(7, 5, {0, 0, 2, 1});
        double area = 0;
        bool pos = true;
        for (int t = 0; t < m.triangle_count(); ++t) {
            area += m.triangle_area(t);
            pos = pos && m.triangle_area(t) > 0;
        }
        report("mesh: positive triangle areas summing to |Omega|",
               pos && std::abs(area - 2.0) <= 1e-12, fmt(area));
        report("mesh: Euler relation V - E + T = 1",
               m.vertex_count() - m.edge_count() + m.triangle_count() == 1);
    }
    {  // quadrature exactness
        bool ok = true;
        double worst = 0;
        for (int d = 1; d <= 6; ++d) {
            const QuadratureRule q = quadrature(d);
            for (int p = 0; p <= q.degree; ++p)
                for (int r = 0; p + r <= q.degree; ++r) {
                    double s = 0;
                    for (int k = 0; k < q.size(); ++k)
                        s += q.weights[k] * std::pow(q.points[k][1], p) *
                             std::pow(q.points[k][2], r);
                    auto fact = [](int n) {
                        double f = 1;
                        for (int i = 2; i <= n; ++i) f *= i;
                        return f;
                    };
                    const double exact = fact(p) * fact(r) / fact(p + r + 2);
                    worst = std::max(worst, std::abs(s - exact));
                    ok = ok && std::abs(s - exact) <= 1e-14;
                }
        }
        report("quadrature: exact on monomials up to the stated degree", ok, fmt(worst));
    }
    {  // potential split
        bool ok = true;
        for (double beta = 0.0; beta <= 2.0; beta += 0.25) {
            const double A = Params::default_stab_a(beta);
            for (double c = -1.0; c <= 1.0; c += 0.125) {
                const auto [cv, cc] = split_derivatives(c, c, beta, A);
                ok = ok && std::abs(cv + cc - bulk_f_c(c, beta)) <= 1e-13;
            }
        }
        report("potential: convex + concave derivatives recombine", ok);
    }
    {  // hydrostatic balance
        const auto h = mms::hydrostatic_test(12);
        report("stokes: hydrostatic balance is exact", h.u_inf <= 1e-8 && h.p_err <= 1e-8,
               "u " + fmt(h.u_inf) + ", p " + fmt(h.p_err));
    }
    {  // conservation and decay of the phase-field step
        const Mesh mesh = build_structured_mesh(24, 24);
        const FeSpace space(mesh, SpaceKind::P1Scalar);
        const FeSpace vspace(mesh, SpaceKind::P2Vector2);
        const SparseMatrix mass = assemble_mass(space);
        Params params;
        params.pe = 1000.0;
        params.ch = 0.02;
        params.beta_max = 0.2;
        params.stab_a = 0.0;
        const Field beta_field = Field::constant(space, 0.2);
        const Field u0 = Field::zero(vspace);

        InitSpec init;
        init.kind = InitKind::SeededRandom;
        init.mean_c = 0.2;
        init.amplitude = 0.25;

        double worst_mass = 0.0;
        bool decay_ok = true;
        for (double dt : {0.01, 0.1, 1.0}) {
            params.dt = dt;
            Field c = initial_condition(init, space, 42, params.ch);
            const double mass0 = mass.apply(c.coeffs).sum();
            double energy = discrete_energy(c, 0.2, params.ch);
            ChWorkspace ws;
            for (int m = 0; m < 12; ++m) {
                ChStepInput in{&c, &u0, &beta_field, &params, nullptr};
                c = ch_step(in, 1e-10, 50, &ws).c;
                worst_mass = std::max(worst_mass,
                                      std::abs(mass.apply(c.coeffs).sum() - mass0));
                const double next = discrete_energy(c, 0.2, params.ch);
                decay_ok = decay_ok && next <= energy + 1e-12;
                energy = next;
            }
        }
        report("cahn-hilliard: mass conserved over 12 steps at dt in {0.01, 0.1, 1}",
               worst_mass <= 1e-9, fmt(worst_mass));
        report("cahn-hilliard: energy non-increasing for every tested dt", decay_ok);
    }
    {  // heat mean preservation
        const Mesh mesh = build_structured_mesh(12, 12);
        const FeSpace space(mesh, SpaceKind::P1Scalar);
        const FeSpace vspace(mesh, SpaceKind::P2Vector2);
        const SparseMatrix mass = assemble_mass(space);
        Params params;
        params.pe_theta = 5.0;
        params.dt = 0.05;
        BoundarySpec bc;
        bc.velocity_dirichlet = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma3,
                                 SegmentTag::Gamma4};
        bc.theta_insulated = bc.velocity_dirichlet;
        Vector init(space.dof_count());
        for (int i = 0; i < space.dof_count(); ++i)
            init[i] = 0.4 + 0.2 * uniform_pm1(3, i);
        Field theta(space, init);
        const Field u0 = Field::zero(vspace);
        const double mean0 = mass.apply(theta.coeffs).sum();
        double worst = 0;
        HeatWorkspace ws;
        for (int m = 0; m < 10; ++m) {
            HeatStepInput in{&theta, &u0, &params, &bc, nullptr};
            theta = heat_step(in, &ws);
            worst = std::max(worst, std::abs(mass.apply(theta.coeffs).sum() - mean0));
        }
        report("heat: insulated walk preserves the discrete mean", worst <= 1e-10, fmt(worst));
    }
    {  // determinism
        ExperimentConfig cfg = preset_config("exp2-cold");
        cfg.mesh.nx = 12;
        cfg.mesh.ny = 12;
        cfg.run.t_final = 0.05;
        cfg.run.cadence = 5;
        const RunResult a = run(cfg);
        const RunResult b = run(cfg);
        report("driver: repeated runs give bit-identical diagnostics",
               diagnostics_csv_text(a.diagnostics) == diagnostics_csv_text(b.diagnostics));
    }
    std::cout << (g_failures == 0 ? "all checks passed\n"
                                  : std::to_string(g_failures) + " check(s) failed\n");
    return g_failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chs2d - temperature-coupled Cahn-Hilliard-Stokes solver"};
    app.set_version_flag("--version", chs::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, preset_name, mms_which;
    long long seed_override = -1;
    int cadence_override = 0;
    bool quiet = false;

    CLI::App* run_cmd = app.add_subcommand("run", "execute a configured simulation");
    run_cmd->add_option("config", config_path, "configuration file")->required();
    run_cmd->add_option("--out", out_dir,
                        "output base directory (default $CHS2D_OUT or ./runs)");
    run_cmd->add_option("--seed", seed_override, "override the RNG seed");
    run_cmd->add_option("--cadence", cadence_override, "override the snapshot cadence");
    run_cmd->add_flag("--quiet", quiet, "suppress progress output");

    CLI::App* preset_cmd = app.add_subcommand("preset", "experiment catalogue");
    CLI::App* preset_list = preset_cmd->add_subcommand("list", "list presets");
    CLI::App* preset_emit = preset_cmd->add_subcommand("emit", "write a preset config file");
    preset_emit->add_option("name", preset_name, "preset name")->required();
    preset_emit->add_option("--out", out_dir, "directory for the emitted file");
    preset_cmd->require_subcommand(1);

    CLI::App* mms_cmd = app.add_subcommand("mms", "manufactured-solution convergence study");
    mms_cmd->add_option("which", mms_which, "heat | stokes | ch-diffusive")->required();

    CLI::App* check_cmd = app.add_subcommand("check", "structural property suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << app.help() << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*run_cmd)
            return cmd_run(config_path, out_dir, seed_override, cadence_override, quiet);
        if (*preset_list) return cmd_preset_list();
        if (*preset_emit) return cmd_preset_emit(preset_name, out_dir);
        if (*mms_cmd) return cmd_mms(mms_which);
        if (*check_cmd) return cmd_check();
    } catch (const chs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
