#pragma once
// One convex-splitting step of the convective Cahn-Hilliard system, solved
// as a coupled nonlinear system for (c, mu) by damped Newton iteration:
//
//   R1[psi] = int (c - c_old)/dt psi + int (u . grad c) psi
//           + (1/Pe) int grad mu . grad psi
//   R2[phi] = int mu phi - Ch^2 int grad c . grad phi
//           - int (8 c^3 + 2 A c) phi + int 2 (A + 1 - beta) c_old phi
//
// The convex part of the bulk energy is implicit in c, the concave part
// explicit in c_old with the already-updated temperature in beta.

#include <optional>
#include <utility>
#include <vector>

#include "chs/assembly.hpp"
#include "chs/physics.hpp"

namespace chs {

struct NewtonReport {
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> damping;  // accepted step factor per iteration
};

struct NewtonDiverged : Error {
    NewtonDiverged(const std::string& what, NewtonReport r)
        : Error(what), report(std::move(r)) {}
    NewtonReport report;
};

struct ChStepInput {
    const Field* c_old = nullptr;
    const Field* velocity = nullptr;    // u at the new time level
    const Field* beta_field = nullptr;  // nodal beta(theta_new)
    const Params* params = nullptr;
    // Test-only manufactured source added to the first equation.
    const Vector* source = nullptr;
};

struct ChStepResult {
    Field c;
    Field mu;
    NewtonReport report;
};

struct ChWorkspace {
    SparseMatrix mass;
    SparseMatrix stiffness;
    SparseLuSolver mass_lu;
    SparseLuSolver jacobian_lu;
    bool ready = false;
};

namespace detail {

struct ChSystem {
    const ChStepInput& in;
    const FeSpace& space;
    int n;
    const SparseMatrix& M;
    const SparseMatrix& K;
    SparseMatrix C;               // convection with the step velocity
    Vector concave_load;          // int 2 (A + 1 - beta) c_old phi_i
    std::vector<Triplet> jac_base;  // Jacobian entries constant over iterations

    ChSystem(const ChStepInput& input, ChWorkspace& w)
        : in(input), space(*input.c_old->space), n(space.dof_count()),
          M(w.mass), K(w.stiffness) {
        const Params& p = *in.params;
        C = assemble_convection(space, *in.velocity);
        const double A = p.stab_a;
        concave_load = assemble_load(
            space, *in.beta_field, *in.c_old,
            [A](double beta, double co) { return 2.0 * (A + 1.0 - beta) * co; }, 6);

        const auto append_block = [this](const SparseMatrix& S, int row0, int col0,
                                         double scale) {
            const auto& m = S.eigen();
            for (int k = 0; k < m.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
                    jac_base.emplace_back(row0 + it.row(), col0 + it.col(),
                                          scale * it.value());
        };
        append_block(M, 0, 0, 1.0 / p.dt);
        append_block(C, 0, 0, 1.0);
        append_block(K, 0, n, 1.0 / p.pe);
        append_block(K, n, 0, -p.ch * p.ch);
        append_block(M, n, n, 1.0);
    }

    Vector nonlinear_load(const Field& c) const {
        const double A = in.params->stab_a;
        return assemble_load(
            space, c, [A](double cv) { return 8.0 * cv * cv * cv + 2.0 * A * cv; }, 6);
    }

    Vector residual(const Field& c, const Field& mu) const {
        const Params& p = *in.params;
        Vector r(2 * n);
        r.head(n) = M.apply(c.coeffs - in.c_old->coeffs) / p.dt + C.apply(c.coeffs) +
                    K.apply(mu.coeffs) / p.pe;
        if (in.source) r.head(n) -= *in.source;
        r.tail(n) = M.apply(mu.coeffs) - p.ch * p.ch * K.apply(c.coeffs) -
                    nonlinear_load(c) + concave_load;
        return r;
    }

    SparseMatrix jacobian(const Field& c) const {
        const double A = in.params->stab_a;
        const SparseMatrix W = assemble_weighted_mass(
            space, c, [A](double cv) { return 24.0 * cv * cv + 2.0 * A; }, 6);
        std::vector<Triplet> trips = jac_base;
        const auto& m = W.eigen();
        for (int k = 0; k < m.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
                trips.emplace_back(n + it.row(), it.col(), -it.value());
        return SparseMatrix(2 * n, 2 * n, trips);
    }
};

}  // namespace detail

// Weak-form residual pair (R1, R2) at a trial state; used by the Newton
// loop and directly by tests.
inline std::pair<Vector, Vector> ch_residual(const Field& c_new, const Field& mu_new,
                                             const ChStepInput& in, ChWorkspace* ws = nullptr) {
    ChWorkspace local;
    ChWorkspace& w = ws ? *ws : local;
    if (!w.ready) {
        w.mass = assemble_mass(*in.c_old->space);
        w.stiffness = assemble_stiffness(*in.c_old->space);
        w.ready = true;
    }
    detail::ChSystem sys(in, w);
    const Vector r = sys.residual(c_new, mu_new);
    return {r.head(sys.n), r.tail(sys.n)};
}

// Assembled Newton matrix at a trial state (blocks: M/dt + C(u), K/Pe;
// -Ch^2 K - M_w(24 c^2 + 2A), M); exposed for consistency checks.
inline SparseMatrix ch_jacobian(const Field& c_new, const ChStepInput& in,
                                ChWorkspace* ws = nullptr) {
    ChWorkspace local;
    ChWorkspace& w = ws ? *ws : local;
    if (!w.ready) {
        w.mass = assemble_mass(*in.c_old->space);
        w.stiffness = assemble_stiffness(*in.c_old->space);
        w.ready = true;
    }
    return detail::ChSystem(in, w).jacobian(c_new);
}

inline ChStepResult ch_step(const ChStepInput& in, double tol = 1e-10, int max_iter = 50,
                            ChWorkspace* ws = nullptr) {
    const FeSpace& space = *in.c_old->space;
    detail::require_same_mesh(space, *in.velocity->space, "ch_step");
    detail::require_same_mesh(space, *in.beta_field->space, "ch_step");
    if (!(tol > 0.0)) throw ValidationError("ch_step: tolerance must be positive");
    check_split(in.beta_field->coeffs.maxCoeff(), in.params->stab_a);

    ChWorkspace local;
    ChWorkspace& w = ws ? *ws : local;
    if (!w.ready) {
        w.mass = assemble_mass(space);
        w.stiffness = assemble_stiffness(space);
        w.ready = true;
    }
    detail::ChSystem sys(in, w);
    const int n = sys.n;
    const Params& p = *in.params;

    // Warm start: c at the previous level, mu from the splitting formula
    // evaluated there (makes R2 vanish at the initial guess).
    Field c(space, in.c_old->coeffs);
    Vector mu_rhs = p.ch * p.ch * sys.K.apply(c.coeffs) + sys.nonlinear_load(c) -
                    sys.concave_load;
    Field mu(space, w.mass_lu.solve(sys.M, mu_rhs));

    NewtonReport report;
    Vector r = sys.residual(c, mu);
    double rnorm = r.norm();
    constexpr double kMinDamping = 1.0 / 1024.0;  // 2^-10

    for (int iter = 0; iter < max_iter; ++iter) {
        if (rnorm <= tol) {
            report.final_residual = rnorm;
            return {std::move(c), std::move(mu), std::move(report)};
        }
        const SparseMatrix J = sys.jacobian(c);
        const Vector delta = w.jacobian_lu.solve(J, -r);

        double s = 1.0;
        Field c_try = c, mu_try = mu;
        Vector r_try;
        double rnorm_try = 0.0;
        while (true) {
            c_try.coeffs = c.coeffs + s * delta.head(n);
            mu_try.coeffs = mu.coeffs + s * delta.tail(n);
            r_try = sys.residual(c_try, mu_try);
            rnorm_try = r_try.norm();
            if (rnorm_try < rnorm || rnorm_try <= tol) break;
            s *= 0.5;
            if (s < kMinDamping) {
                report.iterations = iter + 1;
                report.final_residual = rnorm;
                throw NewtonDiverged("ch_step: damping floor reached at residual " +
                                         std::to_string(rnorm),
                                     report);
            }
        }
        c = std::move(c_try);
        mu = std::move(mu_try);
        r = std::move(r_try);
        rnorm = rnorm_try;
        report.damping.push_back(s);
        report.iterations = iter + 1;
    }
    if (rnorm <= tol) {
        report.final_residual = rnorm;
        return {std::move(c), std::move(mu), std::move(report)};
    }
    report.final_residual = rnorm;
    throw NewtonDiverged("ch_step: no convergence in " + std::to_string(max_iter) +
                             " iterations, residual " + std::to_string(rnorm),
                         report);
}

}  // namespace chs
