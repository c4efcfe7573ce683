#include <catch2/catch_amalgamated.hpp>

#include "chs/cahn_hilliard.hpp"
#include "chs/diagnostics.hpp"
#include "chs/mms.hpp"
#include "chs/stokes.hpp"

using namespace chs;

namespace {

double noise(uint64_t seed, int i) {
    uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (uint64_t(i) + 1));
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    x ^= x >> 31;
    return 2.0 * (double(x >> 11) / 9007199254740992.0) - 1.0;
}

struct ChFixture {
    Mesh mesh;
    FeSpace space;
    FeSpace vspace;
    Params params;
    Field beta_field;

    explicit ChFixture(int n, double beta = 0.2)
        : mesh(build_structured_mesh(n, n)), space(mesh, SpaceKind::P1Scalar),
          vspace(mesh, SpaceKind::P2Vector2), beta_field(Field::constant(space, beta)) {
        params.pe = 100.0;
        params.ch = 0.05;
        params.dt = 0.01;
        params.beta_max = beta;
        params.stab_a = Params::default_stab_a(beta);
    }

    Field noisy_c(double mean, double amp, uint64_t seed) const {
        Vector v(space.dof_count());
        for (int i = 0; i < space.dof_count(); ++i) v[i] = mean + amp * noise(seed, i);
        return Field(space, v);
    }
};

}  // namespace

TEST_CASE("residual vanishes at a stationary uniform state") {
    ChFixture f(8, 0.2);
    const double c_star = std::sqrt(1.0 - 0.2) / 2.0;  // root of the bulk derivative
    const Field c = Field::constant(f.space, c_star);
    const Field u = Field::zero(f.vspace);
    const Field mu = Field::zero(f.space);
    ChStepInput in{&c, &u, &f.beta_field, &f.params, nullptr};
    const auto [r1, r2] = ch_residual(c, mu, in);
    CHECK(r1.lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(r2.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("constant chemical potential drops out of the transport residual") {
    ChFixture f(6);
    const Field c = f.noisy_c(0.1, 0.2, 5);
    const Field u = Field::zero(f.vspace);
    const Field mu = Field::constant(f.space, 1.0);
    ChStepInput in{&c, &u, &f.beta_field, &f.params, nullptr};
    const auto [r1, r2] = ch_residual(c, mu, in);
    CHECK(r1.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("discretely divergence-free transport conserves the total over tests = 1") {
    // velocity from an enclosed lid-driven Stokes solve: u.n = 0 on the
    // boundary and int q div u = 0 for every P1 test function
    ChFixture f(8, 0.0);
    Params sp;
    BoundarySpec bc;
    bc.velocity_dirichlet = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma3,
                             SegmentTag::Gamma4};
    bc.theta_insulated = bc.velocity_dirichlet;
    bc.lid = LidSpec{SegmentTag::Gamma3, 16.0};
    const Field c0 = Field::zero(f.space);
    StokesStepInput sin_{&c0, &sp, &bc, nullptr};
    const StokesResult stokes = stokes_step(sin_);

    const Field c = f.noisy_c(0.2, 0.25, 17);
    const SparseMatrix conv = assemble_convection(f.space, stokes.velocity);
    const double total = conv.apply(c.coeffs).sum();  // convection part of R1[1]
    CHECK(std::abs(total) <= 1e-11);
}

TEST_CASE("Jacobian matches directional finite differences on an 8x8 mesh") {
    ChFixture f(8);
    const Field c_old = f.noisy_c(0.2, 0.3, 23);
    const Field u = Field::zero(f.vspace);
    ChStepInput in{&c_old, &u, &f.beta_field, &f.params, nullptr};

    const int n = f.space.dof_count();
    Field c(f.space, c_old.coeffs);
    Field mu = Field::constant(f.space, 0.3);
    const SparseMatrix jac = ch_jacobian(c, in);

    Vector v(2 * n);
    for (int i = 0; i < 2 * n; ++i) v[i] = noise(77, i);
    v /= v.norm();

    const double h = 1e-6;
    Field c_p(f.space, c.coeffs + h * v.head(n));
    Field mu_p(f.space, mu.coeffs + h * v.tail(n));
    const auto [r1_p, r2_p] = ch_residual(c_p, mu_p, in);
    const auto [r1_0, r2_0] = ch_residual(c, mu, in);
    Vector fd(2 * n);
    fd.head(n) = (r1_p - r1_0) / h;
    fd.tail(n) = (r2_p - r2_0) / h;

    const Vector jv = jac.apply(v);
    CHECK((fd - jv).lpNorm<Eigen::Infinity>() <= 1e-5);
}

TEST_CASE("stationary initial guess converges without Newton iterations") {
    ChFixture f(10, 0.2);
    const double c_star = std::sqrt(0.8) / 2.0;
    const Field c = Field::constant(f.space, c_star);
    const Field u = Field::zero(f.vspace);
    ChStepInput in{&c, &u, &f.beta_field, &f.params, nullptr};
    const ChStepResult res = ch_step(in);
    CHECK(res.report.iterations <= 1);
    CHECK((res.c.coeffs - c.coeffs).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("converged steps conserve mass with impermeable velocity") {
    ChFixture f(12, 0.2);
    const SparseMatrix mass = assemble_mass(f.space);
    Field c = f.noisy_c(0.2, 0.05, 42);
    const Field u = Field::zero(f.vspace);
    const double mass0 = mass.apply(c.coeffs).sum();
    ChWorkspace ws;
    for (int m = 0; m < 5; ++m) {
        ChStepInput in{&c, &u, &f.beta_field, &f.params, nullptr};
        const ChStepResult res = ch_step(in, 1e-10, 50, &ws);
        c = res.c;
        CHECK(std::abs(mass.apply(c.coeffs).sum() - mass0) <= 1e-9);
        CHECK(res.report.final_residual <= 1e-10);
    }
}

TEST_CASE("isothermal diffusive stepping decays the discrete energy for any dt") {
    for (double dt : {0.01, 0.1, 1.0}) {
        ChFixture f(12, 0.2);
        f.params.dt = dt;
        f.params.pe = 100.0;
        Field c = f.noisy_c(0.2, 0.05, 7);
        const Field u = Field::zero(f.vspace);
        double energy = discrete_energy(c, 0.2, f.params.ch);
        ChWorkspace ws;
        for (int m = 0; m < 10; ++m) {
            ChStepInput in{&c, &u, &f.beta_field, &f.params, nullptr};
            c = ch_step(in, 1e-10, 50, &ws).c;
            const double next = discrete_energy(c, 0.2, f.params.ch);
            INFO("dt " << dt << " step " << m);
            CHECK(next <= energy + 1e-12);
            energy = next;
        }
    }
}

TEST_CASE("the split precondition is enforced against the nodal beta bound") {
    ChFixture f(4, 1.5);
    f.params.stab_a = 0.0;  // too small for beta = 1.5
    f.params.beta_max = 1.5;
    const Field c = Field::constant(f.space, 0.1);
    const Field u = Field::zero(f.vspace);
    ChStepInput in{&c, &u, &f.beta_field, &f.params, nullptr};
    CHECK_THROWS_AS(ch_step(in), ValidationError);
}

TEST_CASE("iteration cap raises NewtonDiverged with the report attached") {
    ChFixture f(6);
    Field c = f.noisy_c(0.2, 0.3, 3);
    const Field u = Field::zero(f.vspace);
    ChStepInput in{&c, &u, &f.beta_field, &f.params, nullptr};
    try {
        ch_step(in, 1e-30, 1);
        FAIL("expected NewtonDiverged");
    } catch (const NewtonDiverged& e) {
        CHECK(e.report.iterations == 1);
        CHECK(e.report.final_residual > 0.0);
    }
}

TEST_CASE("manufactured diffusive solution converges at second order", "[mms]") {
    const auto s = mms::ch_diffusive_study();
    INFO("errors " << s.errors[0] << " " << s.errors[1] << " " << s.errors[2] << ", order "
                   << s.order);
    CHECK(s.order >= 1.8);
}
