#include <catch2/catch_amalgamated.hpp>

#include "chs/heat.hpp"
#include "chs/mms.hpp"

using namespace chs;

namespace {

struct HeatFixture {
    Mesh mesh = build_structured_mesh(10, 10);
    FeSpace space{mesh, SpaceKind::P1Scalar};
    FeSpace vspace{mesh, SpaceKind::P2Vector2};
    Params params;
    BoundarySpec bc;

    HeatFixture() {
        params.pe_theta = 5.0;
        params.dt = 0.05;
        bc.velocity_dirichlet = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma3,
                                 SegmentTag::Gamma4};
    }

    void dirichlet_on_gamma4(double value) {
        bc.theta_dirichlet = {{SegmentTag::Gamma4, value}};
        bc.theta_insulated = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma3};
    }
    void pure_neumann() {
        bc.theta_dirichlet.clear();
        bc.theta_insulated = {SegmentTag::Gamma1, SegmentTag::Gamma2, SegmentTag::Gamma3,
                              SegmentTag::Gamma4};
    }
};

}  // namespace

TEST_CASE("constant state with matching Dirichlet data is a fixed point") {
    HeatFixture f;
    f.dirichlet_on_gamma4(0.7);
    const Field u0 = Field::zero(f.vspace);
    const Field theta0 = Field::constant(f.space, 0.7);
    HeatStepInput in{&theta0, &u0, &f.params, &f.bc, nullptr};
    const Field theta1 = heat_step(in);
    CHECK((theta1.coeffs - theta0.coeffs).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("pure Neumann walk preserves the discrete mean over 10 steps") {
    HeatFixture f;
    f.pure_neumann();
    const Field u0 = Field::zero(f.vspace);
    const SparseMatrix mass = assemble_mass(f.space);

    Vector init(f.space.dof_count());
    for (int i = 0; i < f.space.dof_count(); ++i) {
        const Vec2 p = f.space.node_coord(i);
        init[i] = 0.5 + 0.3 * std::cos(2.0 * p.x) * p.y;
    }
    Field theta(f.space, init);
    const double mean0 = mass.apply(theta.coeffs).sum();

    HeatWorkspace ws;
    for (int m = 0; m < 10; ++m) {
        HeatStepInput in{&theta, &u0, &f.params, &f.bc, nullptr};
        theta = heat_step(in, &ws);
        CHECK(std::abs(mass.apply(theta.coeffs).sum() - mean0) <= 1e-10);
    }
}

TEST_CASE("distance to constant Dirichlet data is non-increasing") {
    HeatFixture f;
    f.dirichlet_on_gamma4(0.2);
    const Field u0 = Field::zero(f.vspace);
    const SparseMatrix mass = assemble_mass(f.space);

    Vector init(f.space.dof_count());
    for (int i = 0; i < f.space.dof_count(); ++i) {
        const Vec2 p = f.space.node_coord(i);
        init[i] = 0.2 + std::sin(3.0 * p.x + 1.0) * std::sin(2.0 * p.y);
    }
    for (int v : boundary_vertices(f.mesh, {SegmentTag::Gamma4})) init[v] = 0.2;
    Field theta(f.space, init);

    auto dist = [&](const Field& th) {
        const Vector d = th.coeffs - Vector::Constant(th.coeffs.size(), 0.2);
        return std::sqrt(d.dot(mass.apply(d)));
    };
    double prev = dist(theta);
    HeatWorkspace ws;
    for (int m = 0; m < 15; ++m) {
        HeatStepInput in{&theta, &u0, &f.params, &f.bc, nullptr};
        theta = heat_step(in, &ws);
        const double cur = dist(theta);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("nonnegative data stays nonnegative in practice (monitored bound)") {
    HeatFixture f;
    f.dirichlet_on_gamma4(1.5);
    const Field u0 = Field::zero(f.vspace);
    Vector init = Vector::Constant(f.space.dof_count(), 0.3);
    for (int v : boundary_vertices(f.mesh, {SegmentTag::Gamma4})) init[v] = 1.5;
    Field theta(f.space, init);
    HeatWorkspace ws;
    for (int m = 0; m < 20; ++m) {
        HeatStepInput in{&theta, &u0, &f.params, &f.bc, nullptr};
        theta = heat_step(in, &ws);
        CHECK(min_theta(theta) >= -1e-6);
    }
}

TEST_CASE("min_theta returns the nodal minimum") {
    HeatFixture f;
    Field c = Field::constant(f.space, 0.3);
    CHECK(min_theta(c) == 0.3);
    c.coeffs[7] = -0.1;
    CHECK(min_theta(c) == -0.1);
}

TEST_CASE("mesh mismatch between theta and velocity is rejected") {
    HeatFixture f;
    const Mesh other = build_structured_mesh(2, 2);
    const FeSpace vother(other, SpaceKind::P2Vector2);
    const Field u0 = Field::zero(vother);
    const Field theta0 = Field::constant(f.space, 0.5);
    HeatStepInput in{&theta0, &u0, &f.params, &f.bc, nullptr};
    CHECK_THROWS_AS(heat_step(in), ValidationError);
}

TEST_CASE("manufactured solution: spatial order ~ 2, temporal order ~ 1", "[mms]") {
    const auto spatial = mms::heat_spatial_study();
    INFO("spatial errors " << spatial.errors[0] << " " << spatial.errors[1] << " "
                           << spatial.errors[2] << ", order " << spatial.order);
    CHECK(spatial.order >= 1.8);

    const auto temporal = mms::heat_temporal_study();
    INFO("temporal errors " << temporal.errors[0] << " " << temporal.errors[1] << " "
                            << temporal.errors[2] << ", order " << temporal.order);
    CHECK(temporal.order >= 0.9);
}
