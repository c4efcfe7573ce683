#pragma once
// Backward-Euler step of the convected heat equation
//   (M/dt + C(u_old) + K/Pe_theta) theta_new = (M/dt) theta_old + source,
// with the Dirichlet data imposed strongly and insulated sides natural.

#include <optional>

#include "chs/assembly.hpp"
#include "chs/physics.hpp"

namespace chs {

struct HeatStepInput {
    const Field* theta_old = nullptr;
    const Field* velocity = nullptr;  // u at the previous time level
    const Params* params = nullptr;
    const BoundarySpec* bc = nullptr;
    // Test-only manufactured source added to the right-hand side; never set
    // in production runs.
    const Vector* source = nullptr;
};

// Reusable matrices for repeated heat steps on one mesh.
struct HeatWorkspace {
    SparseMatrix mass;
    SparseMatrix stiffness;
    SparseLuSolver lu;
    bool ready = false;
};

inline Field heat_step(const HeatStepInput& in, HeatWorkspace* ws = nullptr) {
    const FeSpace& space = *in.theta_old->space;
    detail::require_same_mesh(space, *in.velocity->space, "heat_step");
    const Params& p = *in.params;
    if (!(p.dt > 0.0) || !(p.pe_theta > 0.0))
        throw ValidationError("heat_step: dt and Pe_theta must be positive");

    HeatWorkspace local;
    HeatWorkspace& w = ws ? *ws : local;
    if (!w.ready) {
        w.mass = assemble_mass(space);
        w.stiffness = assemble_stiffness(space);
        w.ready = true;
    }

    const SparseMatrix convection = assemble_convection(space, *in.velocity);
    SparseMatrix A(Eigen::SparseMatrix<double>(w.mass.eigen() / p.dt + convection.eigen() +
                                               w.stiffness.eigen() / p.pe_theta));

    Vector rhs = w.mass.apply(in.theta_old->coeffs) / p.dt;
    if (in.source) rhs += *in.source;

    apply_dirichlet(A, rhs, scalar_dirichlet(space, in.bc->theta_dirichlet));
    return Field(space, w.lu.solve(A, rhs));
}

inline double min_theta(const Field& theta) { return theta.coeffs.minCoeff(); }

}  // namespace chs
