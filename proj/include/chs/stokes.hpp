#pragma once
// Quasi-static variable-viscosity Stokes solve on the Taylor-Hood pair:
//   int 2 eta(c) E(u):E(v) - int p div v = int G rho(c) ghat . v
//   int q div u = 0
// assembled as the symmetric indefinite block system
//   [ A  -B^T ] [u]   [F]
//   [-B    0  ] [p] = [0]
// with no-slip (and the optional lid profile) imposed strongly and the
// traction-free condition natural. When no traction-free segment exists the
// pressure level is pinned by a zero-mean multiplier row.

#include <memory>
#include <optional>

#include "chs/assembly.hpp"
#include "chs/physics.hpp"

namespace chs {

// Tangential lid velocity: gamma (x/L)^2 (1 - x/L)^2 along the segment.
inline Vec2 lid_profile(double x, double gamma, double length) {
    const double s = x / length;
    return {gamma * s * s * (1.0 - s) * (1.0 - s), 0.0};
}

struct StokesStepInput {
    const Field* c_old = nullptr;  // P1 order parameter for the coefficients
    const Params* params = nullptr;
    const BoundarySpec* bc = nullptr;
    // Test-only manufactured force replacing the buoyancy term.
    std::function<Vec2(Vec2)> manufactured_force;
};

struct StokesResult {
    Field velocity;
    Field pressure;
    double divergence_residual = 0.0;  // ||B u||_2 / max(1, ||u||_2)
    // keep the solution spaces alive past the workspace that built them
    std::shared_ptr<const FeSpace> velocity_space;
    std::shared_ptr<const FeSpace> pressure_space;
};

struct StokesWorkspace {
    std::shared_ptr<FeSpace> velocity_space;
    std::shared_ptr<FeSpace> pressure_space;
    SparseMatrix divergence;
    Vector pressure_integral;  // int q_k dx
    DirichletConstraints velocity_bc;
    SparseLuSolver lu;
    bool ready = false;
};

inline StokesResult stokes_step(const StokesStepInput& in, StokesWorkspace* ws = nullptr) {
    const Mesh& mesh = in.c_old->space->mesh();
    const Params& p = *in.params;
    const BoundarySpec& bc = *in.bc;
    bc.validate();
    if (bc.velocity_dirichlet.empty())
        throw ValidationError("stokes_step: no velocity Dirichlet segment; "
                              "the Stokes problem needs |Gamma_D| > 0");
    if (in.bc->lid && !bc.stokes_enclosed())
        throw ValidationError("stokes_step: lid-driven configuration requires "
                              "Dirichlet conditions on all walls");

    StokesWorkspace local;
    StokesWorkspace& w = ws ? *ws : local;
    if (!w.ready) {
        w.velocity_space = std::make_shared<FeSpace>(mesh, SpaceKind::P2Vector2);
        w.pressure_space = std::make_shared<FeSpace>(
            mesh, bc.stokes_enclosed() ? SpaceKind::P1PressureZeroMean : SpaceKind::P1Scalar);
        w.divergence = assemble_divergence(*w.velocity_space, *w.pressure_space);
        w.pressure_integral = assemble_unit_load(*w.pressure_space);
        const double lid_length = mesh.rect.width();
        const double lid_gamma = bc.lid ? bc.lid->gamma : 0.0;
        w.velocity_bc = velocity_dirichlet(
            *w.velocity_space, bc.velocity_dirichlet, bc.lid,
            [lid_gamma, lid_length, &mesh](double x) {
                return lid_profile(x - mesh.rect.x0, lid_gamma, lid_length);
            });
        w.ready = true;
    }
    const FeSpace& vel = *w.velocity_space;
    const FeSpace& pre = *w.pressure_space;
    const int nu = vel.dof_count();
    const int np = pre.dof_count();
    const bool pin_pressure = bc.stokes_enclosed();
    const int n = nu + np + (pin_pressure ? 1 : 0);

    const Field& c = *in.c_old;
    const double lam_eta = p.lambda_eta;
    const SparseMatrix viscous = assemble_stiffness_vector(
        vel,
        [&c, lam_eta](int t, const std::array<double, 3>& l) {
            return eta_of(eval_p1(c, t, l), lam_eta);
        },
        4);

    std::vector<Triplet> trips;
    trips.reserve(viscous.eigen().nonZeros() + 4 * w.divergence.eigen().nonZeros() + 2 * np);
    const auto& ve = viscous.eigen();
    for (int k = 0; k < ve.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(ve, k); it; ++it)
            trips.emplace_back(it.row(), it.col(), it.value());
    const auto& be = w.divergence.eigen();
    for (int k = 0; k < be.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(be, k); it; ++it) {
            trips.emplace_back(nu + it.row(), it.col(), -it.value());
            trips.emplace_back(it.col(), nu + it.row(), -it.value());
        }
    if (pin_pressure)
        for (int k = 0; k < np; ++k) {
            trips.emplace_back(nu + np, nu + k, w.pressure_integral[k]);
            trips.emplace_back(nu + k, nu + np, w.pressure_integral[k]);
        }
    SparseMatrix A(n, n, trips);

    Vector rhs = Vector::Zero(n);
    const Vector force =
        in.manufactured_force
            ? assemble_vector_load(vel, in.manufactured_force, 6)
            : assemble_buoyancy(
                  vel, c, [&p](double cv) { return rho_of(cv, p.lambda_rho); },
                  {p.g * p.g_hat.x, p.g * p.g_hat.y});
    rhs.head(nu) = force;

    apply_dirichlet(A, rhs, w.velocity_bc);
    const Vector x = w.lu.solve(A, rhs);

    StokesResult out{Field(vel, x.head(nu)), Field(pre, x.segment(nu, np)), 0.0,
                     w.velocity_space, w.pressure_space};
    const double div_norm = w.divergence.apply(out.velocity.coeffs).norm();
    out.divergence_residual = div_norm / std::max(1.0, out.velocity.coeffs.norm());
    return out;
}

}  // namespace chs
