#pragma once
// Sequential coupling of the heat, Stokes, and Cahn-Hilliard substeps:
// per time level, the temperature advances with the lagged velocity, the
// coefficient fields and velocity update from the previous order parameter,
// and the phase field advances with the new velocity and temperature.

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "chs/cahn_hilliard.hpp"
#include "chs/diagnostics.hpp"
#include "chs/heat.hpp"
#include "chs/rng.hpp"
#include "chs/stokes.hpp"

namespace chs {

enum class InitKind { Uniform, SeededRandom, TwoLayer };

struct InitSpec {
    InitKind kind = InitKind::SeededRandom;
    double mean_c = 0.2;
    double amplitude = 0.05;       // uniform noise half-width
    uint64_t seed = 42;
    double interface_height = 0.5; // two-layer interface y position
    double theta0 = 0.0;           // constant initial temperature
};

struct RunSpec {
    bool solve_heat = true;
    bool solve_stokes = true;
    double t_final = 2.0;
    int cadence = 10;  // snapshot every this many steps
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
};

struct MeshSpec {
    int nx = 50;
    int ny = 50;
    Rect rect{};
};

struct ExperimentConfig {
    std::string preset;  // name this config was derived from, if any
    MeshSpec mesh;
    Params params;
    BoundarySpec bc;
    InitSpec init;
    RunSpec run;

    int step_count() const {
        return static_cast<int>(std::lround(run.t_final / params.dt));
    }

    void validate() const {
        params.validate();
        bc.validate();
        if (mesh.nx < 1 || mesh.ny < 1)
            throw ValidationError("config: mesh subdivisions must be >= 1");
        if (!(mesh.rect.x1 > mesh.rect.x0) || !(mesh.rect.y1 > mesh.rect.y0))
            throw ValidationError("config: degenerate mesh rectangle");
        if (init.amplitude < 0.0)
            throw ValidationError("config: perturbation amplitude must be >= 0");
        if (!(run.t_final > 0.0)) throw ValidationError("config: final time must be positive");
        const int steps = step_count();
        if (steps < 1 || std::abs(steps * params.dt - run.t_final) > 1e-9 * run.t_final)
            throw ValidationError("config: dt must divide the final time");
        if (run.cadence < 1 || steps % run.cadence != 0)
            throw ValidationError("config: cadence must divide the step count");
        if (!(run.newton_tol > 0.0) || run.newton_max_iter < 1)
            throw ValidationError("config: invalid Newton settings");
    }
};

inline bool operator==(const InitSpec& a, const InitSpec& b) {
    return a.kind == b.kind && a.mean_c == b.mean_c && a.amplitude == b.amplitude &&
           a.seed == b.seed && a.interface_height == b.interface_height &&
           a.theta0 == b.theta0;
}
inline bool operator==(const RunSpec& a, const RunSpec& b) {
    return a.solve_heat == b.solve_heat && a.solve_stokes == b.solve_stokes &&
           a.t_final == b.t_final && a.cadence == b.cadence &&
           a.newton_tol == b.newton_tol && a.newton_max_iter == b.newton_max_iter;
}
inline bool operator==(const MeshSpec& a, const MeshSpec& b) {
    return a.nx == b.nx && a.ny == b.ny && a.rect.x0 == b.rect.x0 && a.rect.y0 == b.rect.y0 &&
           a.rect.x1 == b.rect.x1 && a.rect.y1 == b.rect.y1;
}
inline bool operator==(const Params& a, const Params& b) {
    return a.pe == b.pe && a.pe_theta == b.pe_theta && a.ch == b.ch &&
           a.lambda_rho == b.lambda_rho && a.lambda_eta == b.lambda_eta && a.g == b.g &&
           a.dt == b.dt && a.beta_max == b.beta_max && a.stab_a == b.stab_a &&
           a.g_hat.x == b.g_hat.x && a.g_hat.y == b.g_hat.y;
}
inline bool operator==(const BoundarySpec& a, const BoundarySpec& b) {
    const bool lid_eq = a.lid.has_value() == b.lid.has_value() &&
                        (!a.lid || (a.lid->segment == b.lid->segment &&
                                    a.lid->gamma == b.lid->gamma));
    return a.velocity_dirichlet == b.velocity_dirichlet &&
           a.velocity_traction_free == b.velocity_traction_free &&
           a.theta_dirichlet == b.theta_dirichlet && a.theta_insulated == b.theta_insulated &&
           lid_eq;
}
inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.preset == b.preset && a.mesh == b.mesh && a.params == b.params && a.bc == b.bc &&
           a.init == b.init && a.run == b.run;
}

// Nodal initial condition for the order parameter. The Cahn number sets the
// tanh profile width of the two-layer variant.
inline Field initial_condition(const InitSpec& spec, const FeSpace& space, uint64_t seed,
                               double ch = 0.01) {
    Vector v(space.dof_count());
    switch (spec.kind) {
        case InitKind::Uniform:
            v.setConstant(spec.mean_c);
            break;
        case InitKind::SeededRandom:
            for (int i = 0; i < space.dof_count(); ++i)
                v[i] = spec.mean_c + spec.amplitude * uniform_pm1(seed, i);
            break;
        case InitKind::TwoLayer: {
            // +-0.5 layers joined across the equilibrium tanh profile
            const double width = std::numbers::sqrt2 * ch;
            for (int i = 0; i < space.dof_count(); ++i) {
                const double y = space.node_coord(i).y;
                v[i] = 0.5 * std::tanh((y - spec.interface_height) / width);
            }
            break;
        }
    }
    return Field(space, v);
}

struct SimState {
    int step = 0;
    double time = 0.0;
    Field c;
    Field mu;
    Field theta;
    Field velocity;
    Field pressure;
    NewtonReport last_newton;
    double divergence_residual = 0.0;
};

class Simulation {
public:
    explicit Simulation(ExperimentConfig cfg)
        : cfg_(std::move(cfg)), mesh_(build_structured_mesh(cfg_.mesh.nx, cfg_.mesh.ny,
                                                            cfg_.mesh.rect)),
          p1_(std::make_shared<FeSpace>(mesh_, SpaceKind::P1Scalar)),
          velocity_space_(std::make_shared<FeSpace>(mesh_, SpaceKind::P2Vector2)),
          diag_(*p1_, *velocity_space_) {
        cfg_.validate();
        state_.c = initial_condition(cfg_.init, *p1_, cfg_.init.seed, cfg_.params.ch);
        state_.mu = Field::zero(*p1_);
        state_.theta = Field::constant(*p1_, cfg_.init.theta0);
        state_.velocity = Field::zero(*velocity_space_);
        state_.pressure = Field::zero(*p1_);
        divergence_op_ = assemble_divergence(*velocity_space_, *p1_);
    }

    const ExperimentConfig& config() const { return cfg_; }
    const Mesh& mesh() const { return mesh_; }
    const FeSpace& p1_space() const { return *p1_; }
    const FeSpace& velocity_space() const { return *velocity_space_; }
    const SimState& state() const { return state_; }
    const DiagnosticsContext& diagnostics() const { return diag_; }
    int warning_count() const { return warnings_; }

    // One coupled time step: heat (lagged velocity), coefficient update and
    // Stokes solve (previous order parameter), then the Cahn-Hilliard update
    // with the new velocity and temperature.
    void advance() {
        const Params& p = cfg_.params;
        try {
            if (cfg_.run.solve_heat) {
                HeatStepInput hin{&state_.theta, &state_.velocity, &p, &cfg_.bc, nullptr};
                state_.theta = heat_step(hin, &heat_ws_);
                if (min_theta(state_.theta) < -1e-6) ++warnings_;
            }
            if (cfg_.run.solve_stokes) {
                StokesStepInput sin_{&state_.c, &p, &cfg_.bc, nullptr};
                StokesResult res = stokes_step(sin_, &stokes_ws_);
                state_.velocity = std::move(res.velocity);
                state_.pressure = std::move(res.pressure);
                pressure_space_keepalive_ = res.pressure_space;
                state_.divergence_residual = diag_.divergence_l2(divergence_op_,
                                                                 state_.velocity);
            }
            Vector beta_vals(p1_->dof_count());
            for (int i = 0; i < p1_->dof_count(); ++i)
                beta_vals[i] = beta_of(state_.theta.coeffs[i]);
            const Field beta_field(*p1_, beta_vals);

            ChStepInput cin{&state_.c, &state_.velocity, &beta_field, &p, nullptr};
            ChStepResult res = ch_step(cin, cfg_.run.newton_tol, cfg_.run.newton_max_iter,
                                       &ch_ws_);
            state_.c = std::move(res.c);
            state_.mu = std::move(res.mu);
            state_.last_newton = std::move(res.report);
        } catch (const Error& e) {
            throw SolverError("step " + std::to_string(state_.step + 1) + ": " + e.what());
        }
        ++state_.step;
        state_.time = state_.step * p.dt;
    }

    DiagnosticsRecord record() const {
        DiagnosticsRecord r;
        r.time = state_.time;
        r.total_mass = diag_.mass(state_.c);
        Vector beta_vals(p1_->dof_count());
        for (int i = 0; i < p1_->dof_count(); ++i)
            beta_vals[i] = beta_of(state_.theta.coeffs[i]);
        const double beta_bar = diag_.mean(Field(*p1_, beta_vals));
        r.energy = discrete_energy(state_.c, beta_bar, cfg_.params.ch);
        r.c_min = state_.c.coeffs.minCoeff();
        r.c_max = state_.c.coeffs.maxCoeff();
        r.c_variance = diag_.variance(state_.c);
        r.theta_min = state_.theta.coeffs.minCoeff();
        r.theta_max = state_.theta.coeffs.maxCoeff();
        r.velocity_l2 = diag_.velocity_l2(state_.velocity);
        r.divergence_norm = state_.divergence_residual;
        r.centroid_height = heavy_phase_centroid_height(state_.c);
        r.newton_iterations = state_.last_newton.iterations;
        return r;
    }

private:
    ExperimentConfig cfg_;
    Mesh mesh_;
    std::shared_ptr<FeSpace> p1_;
    std::shared_ptr<FeSpace> velocity_space_;
    std::shared_ptr<const FeSpace> pressure_space_keepalive_;
    DiagnosticsContext diag_;
    SparseMatrix divergence_op_;
    HeatWorkspace heat_ws_;
    StokesWorkspace stokes_ws_;
    ChWorkspace ch_ws_;
    SimState state_;
    int warnings_ = 0;
};

struct RunHooks {
    // called at t = 0 and after every `cadence` steps
    std::function<void(const Simulation&, const DiagnosticsRecord&)> on_snapshot;
};

struct RunResult {
    std::vector<DiagnosticsRecord> diagnostics;  // one record per step incl. t = 0
    DiagnosticsRecord final_record;
    int warnings = 0;
    double wall_seconds = 0.0;
};

inline RunResult run(const ExperimentConfig& cfg, const RunHooks& hooks = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    Simulation sim(cfg);
    RunResult out;
    DiagnosticsRecord rec = sim.record();
    out.diagnostics.push_back(rec);
    if (hooks.on_snapshot) hooks.on_snapshot(sim, rec);

    const int steps = cfg.step_count();
    for (int m = 1; m <= steps; ++m) {
        sim.advance();
        rec = sim.record();
        out.diagnostics.push_back(rec);
        if (hooks.on_snapshot && m % cfg.run.cadence == 0) hooks.on_snapshot(sim, rec);
    }
    out.final_record = rec;
    out.warnings = sim.warning_count();
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace chs
