#pragma once
// Manufactured-solution convergence studies for the heat, Stokes, and
// diffusive Cahn-Hilliard subproblems, plus the hydrostatic balance check.
// Each study reports errors per refinement level and the observed order
// (least-squares slope of log error against log h or log dt).

#include <cmath>
#include <numbers>
#include <vector>

#include "chs/cahn_hilliard.hpp"
#include "chs/diagnostics.hpp"
#include "chs/heat.hpp"
#include "chs/stokes.hpp"

namespace chs::mms {

inline constexpr double kPi = std::numbers::pi;

inline double observed_order(const std::vector<double>& scale,
                             const std::vector<double>& errors) {
    // least-squares slope of log(e) vs log(scale)
    const int n = static_cast<int>(errors.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = std::log(scale[i]);
        const double y = std::log(errors[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double l2_error_p1(const Field& f, const std::function<double(Vec2)>& exact) {
    const Mesh& mesh = f.space->mesh();
    const QuadratureRule q = quadrature(6);
    double s = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        for (int k = 0; k < q.size(); ++k) {
            const double d = eval_p1(f, t, q.points[k]) - exact(geo.point(q.points[k]));
            s += q.weights[k] * geo.det * d * d;
        }
    }
    return std::sqrt(s);
}

inline double l2_error_p2(const Field& f, const std::function<Vec2(Vec2)>& exact) {
    const Mesh& mesh = f.space->mesh();
    const QuadratureRule q = quadrature(6);
    double s = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        for (int k = 0; k < q.size(); ++k) {
            const Vec2 d = eval_p2_vector(f, t, q.points[k]) - exact(geo.point(q.points[k]));
            s += q.weights[k] * geo.det * dot(d, d);
        }
    }
    return std::sqrt(s);
}

// --- heat equation -------------------------------------------------------
// Exact solution theta = exp(-t) cos(pi x) cos(pi y) on the unit square
// (compatible with insulated boundaries), sustained by the source
//   s = (2 pi^2 / Pe_theta - 1) exp(-t) cos(pi x) cos(pi y).

struct HeatMms {
    double pe_theta = 2.0;
    double exact(Vec2 p, double t) const {
        return std::exp(-t) * std::cos(kPi * p.x) * std::cos(kPi * p.y);
    }
    double source(Vec2 p, double t) const {
        return (2.0 * kPi * kPi / pe_theta - 1.0) * exact(p, t);
    }
};

struct StudyResult {
    std::vector<double> scale;   // h or dt per level
    std::vector<double> errors;
    double order = 0.0;
};

inline Field run_heat_mms(const Mesh& mesh, const FeSpace& space, const HeatMms& mms,
                          double dt, int steps) {
    Params params;
    params.pe_theta = mms.pe_theta;
    params.dt = dt;
    BoundarySpec bc;
    bc.velocity_dirichlet = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma3,
                             SegmentTag::Gamma4};
    bc.theta_insulated = bc.velocity_dirichlet;

    const FeSpace vspace(mesh, SpaceKind::P2Vector2);
    const Field u0 = Field::zero(vspace);

    Vector init(space.dof_count());
    for (int i = 0; i < space.dof_count(); ++i) init[i] = mms.exact(space.node_coord(i), 0.0);
    Field theta(space, init);

    HeatWorkspace ws;
    for (int m = 0; m < steps; ++m) {
        const double t_new = (m + 1) * dt;
        const Vector src = assemble_load(
            space, [&](Vec2 p) { return mms.source(p, t_new); }, 6);
        HeatStepInput in;
        in.theta_old = &theta;
        in.velocity = &u0;
        in.params = &params;
        in.bc = &bc;
        in.source = &src;
        theta = heat_step(in, &ws);
    }
    return theta;
}

// Spatial study: dt ~ h^2 keeps both error components at O(h^2).
inline StudyResult heat_spatial_study(std::vector<int> resolutions = {8, 16, 32}) {
    const HeatMms mms;
    const double t_final = 0.25;
    StudyResult out;
    for (int nx : resolutions) {
        const Mesh mesh = build_structured_mesh(nx, nx);
        const FeSpace space(mesh, SpaceKind::P1Scalar);
        const double dt = 0.8 / (nx * nx);
        const int steps = static_cast<int>(std::lround(t_final / dt));
        const Field theta = run_heat_mms(mesh, space, mms, t_final / steps, steps);
        out.scale.push_back(1.0 / nx);
        out.errors.push_back(
            l2_error_p1(theta, [&](Vec2 p) { return mms.exact(p, t_final); }));
    }
    out.order = observed_order(out.scale, out.errors);
    return out;
}

// Temporal study on a fixed mesh against a small-dt reference solution, so
// the spatial error cancels in the comparison.
inline StudyResult heat_temporal_study(int nx = 32,
                                       std::vector<double> dts = {0.1, 0.05, 0.025}) {
    const HeatMms mms;
    const double t_final = 0.4;
    const Mesh mesh = build_structured_mesh(nx, nx);
    const FeSpace space(mesh, SpaceKind::P1Scalar);
    const SparseMatrix mass = assemble_mass(space);

    const int ref_steps = 512;  // reference dt divides t_final exactly
    const Field ref = run_heat_mms(mesh, space, mms, t_final / ref_steps, ref_steps);

    StudyResult out;
    for (double dt : dts) {
        const int steps = static_cast<int>(std::lround(t_final / dt));
        const Field theta = run_heat_mms(mesh, space, mms, t_final / steps, steps);
        const Vector d = theta.coeffs - ref.coeffs;
        out.scale.push_back(dt);
        out.errors.push_back(std::sqrt(d.dot(mass.apply(d))));
    }
    out.order = observed_order(out.scale, out.errors);
    return out;
}

// --- Stokes subproblem ---------------------------------------------------
// Divergence-free velocity from the stream function sin^2(pi x) sin^2(pi y)
// and the zero-mean pressure cos(pi x) cos(pi y); the force is
// f = -laplace(u) + grad p for unit viscosity.

struct StokesMms {
    Vec2 exact_u(Vec2 p) const {
        const double sx = std::sin(kPi * p.x), sy = std::sin(kPi * p.y);
        return {kPi * sx * sx * std::sin(2.0 * kPi * p.y),
                -kPi * std::sin(2.0 * kPi * p.x) * sy * sy};
    }
    double exact_p(Vec2 p) const { return std::cos(kPi * p.x) * std::cos(kPi * p.y); }
    Vec2 force(Vec2 p) const {
        const double p3 = kPi * kPi * kPi;
        const double sx = std::sin(kPi * p.x), sy = std::sin(kPi * p.y);
        const double s2x = std::sin(2.0 * kPi * p.x), s2y = std::sin(2.0 * kPi * p.y);
        const double c2x = std::cos(2.0 * kPi * p.x), c2y = std::cos(2.0 * kPi * p.y);
        const double lap_u1 = 2.0 * p3 * c2x * s2y - 4.0 * p3 * sx * sx * s2y;
        const double lap_u2 = 4.0 * p3 * s2x * sy * sy - 2.0 * p3 * s2x * c2y;
        return {-lap_u1 - kPi * std::sin(kPi * p.x) * std::cos(kPi * p.y),
                -lap_u2 - kPi * std::cos(kPi * p.x) * std::sin(kPi * p.y)};
    }
};

struct StokesStudyResult {
    std::vector<double> scale;
    std::vector<double> errors_u;
    std::vector<double> errors_p;
    double order_u = 0.0;
    double order_p = 0.0;
};

inline StokesStudyResult stokes_study(std::vector<int> resolutions = {8, 16, 32}) {
    const StokesMms mms;
    StokesStudyResult out;
    for (int nx : resolutions) {
        const Mesh mesh = build_structured_mesh(nx, nx);
        const FeSpace p1(mesh, SpaceKind::P1Scalar);
        Params params;  // lambda_eta = 1 -> eta(c) = 1 for any c
        BoundarySpec bc;
        bc.velocity_dirichlet = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma3,
                                 SegmentTag::Gamma4};
        bc.theta_insulated = bc.velocity_dirichlet;
        const Field c = Field::zero(p1);
        StokesStepInput in;
        in.c_old = &c;
        in.params = &params;
        in.bc = &bc;
        in.manufactured_force = [&mms](Vec2 p) { return mms.force(p); };
        const StokesResult res = stokes_step(in);

        const double mean_p = field_mean(res.pressure, assemble_mass(p1), mesh.rect.area());
        Field p_centered(*res.pressure.space,
                         res.pressure.coeffs - Vector::Constant(p1.dof_count(), mean_p));

        out.scale.push_back(1.0 / nx);
        out.errors_u.push_back(l2_error_p2(res.velocity, [&](Vec2 p) { return mms.exact_u(p); }));
        out.errors_p.push_back(l2_error_p1(p_centered, [&](Vec2 p) { return mms.exact_p(p); }));
    }
    out.order_u = observed_order(out.scale, out.errors_u);
    out.order_p = observed_order(out.scale, out.errors_p);
    return out;
}

// Hydrostatic balance: uniform c, gravity down, traction-free top. The
// exact solution u = 0, p = G rho (y_top - y) lies in the discrete space.
struct HydrostaticResult {
    double u_inf = 0.0;
    double p_err = 0.0;
};

inline HydrostaticResult hydrostatic_test(int nx = 16) {
    const Mesh mesh = build_structured_mesh(nx, nx);
    const FeSpace p1(mesh, SpaceKind::P1Scalar);
    Params params;
    params.g = 1.0;
    params.lambda_rho = 0.5;
    BoundarySpec bc;
    bc.velocity_dirichlet = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma4};
    bc.velocity_traction_free = {SegmentTag::Gamma3};
    bc.theta_insulated = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma3,
                          SegmentTag::Gamma4};
    const Field c = Field::zero(p1);
    StokesStepInput in;
    in.c_old = &c;
    in.params = &params;
    in.bc = &bc;
    const StokesResult res = stokes_step(in);

    HydrostaticResult out;
    out.u_inf = res.velocity.coeffs.lpNorm<Eigen::Infinity>();
    const double rho = rho_of(0.0, params.lambda_rho);
    for (int i = 0; i < p1.dof_count(); ++i) {
        const double exact = params.g * rho * (mesh.rect.y1 - p1.node_coord(i).y);
        out.p_err = std::max(out.p_err, std::abs(res.pressure.coeffs[i] - exact));
    }
    return out;
}

// --- diffusive Cahn-Hilliard --------------------------------------------
// Exact c = a0 exp(-t) cos(pi x) cos(pi y) with the matching source in the
// transport equation; the chemical potential follows the constitutive law.

struct ChMms {
    double a0 = 0.2;
    double pe = 10.0;
    double ch = 0.1;
    double beta = 0.2;

    double exact(Vec2 p, double t) const {
        return a0 * std::exp(-t) * std::cos(kPi * p.x) * std::cos(kPi * p.y);
    }
    double source(Vec2 p, double t) const {
        const double amp = a0 * std::exp(-t);
        const double C = std::cos(kPi * p.x), S = std::sin(kPi * p.x);
        const double D = std::cos(kPi * p.y), T = std::sin(kPi * p.y);
        const double c = amp * C * D;
        const double pi2 = kPi * kPi;
        // laplace(c^3) = -6 pi^2 c^3 + 6 c |grad c|^2
        const double grad_sq = amp * amp * pi2 * (S * S * D * D + C * C * T * T);
        const double lap_c3 = -6.0 * pi2 * c * c * c + 6.0 * c * grad_sq;
        const double gamma = -2.0 * (1.0 - beta) + 2.0 * pi2 * ch * ch;
        const double lap_mu = 8.0 * lap_c3 - 2.0 * pi2 * gamma * c;
        return -c - lap_mu / pe;
    }
};

inline StudyResult ch_diffusive_study(std::vector<int> resolutions = {8, 16, 32}) {
    const ChMms mms;
    const double t_final = 0.2;
    StudyResult out;
    for (int nx : resolutions) {
        const Mesh mesh = build_structured_mesh(nx, nx);
        const FeSpace space(mesh, SpaceKind::P1Scalar);
        const FeSpace vspace(mesh, SpaceKind::P2Vector2);
        const double dt_raw = 1.28 / (nx * nx);
        const int steps = static_cast<int>(std::lround(t_final / dt_raw));
        const double dt = t_final / steps;

        Params params;
        params.pe = mms.pe;
        params.ch = mms.ch;
        params.dt = dt;
        params.beta_max = mms.beta;
        params.stab_a = 0.0;

        Vector init(space.dof_count());
        for (int i = 0; i < space.dof_count(); ++i)
            init[i] = mms.exact(space.node_coord(i), 0.0);
        Field c(space, init);
        const Field u0 = Field::zero(vspace);
        const Field beta_field = Field::constant(space, mms.beta);

        ChWorkspace ws;
        for (int m = 0; m < steps; ++m) {
            const double t_new = (m + 1) * dt;
            const Vector src = assemble_load(
                space, [&](Vec2 p) { return mms.source(p, t_new); }, 6);
            ChStepInput in;
            in.c_old = &c;
            in.velocity = &u0;
            in.beta_field = &beta_field;
            in.params = &params;
            in.source = &src;
            c = ch_step(in, 1e-11, 50, &ws).c;
        }
        out.scale.push_back(1.0 / nx);
        out.errors.push_back(l2_error_p1(c, [&](Vec2 p) { return mms.exact(p, t_final); }));
    }
    out.order = observed_order(out.scale, out.errors);
    return out;
}

}  // namespace chs::mms
