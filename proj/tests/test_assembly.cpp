#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>

#include "chs/assembly.hpp"
#include "chs/quadrature.hpp"

using namespace chs;

namespace {

Field p1_from(const FeSpace& s, const std::function<double(Vec2)>& f) {
    Vector v(s.dof_count());
    for (int i = 0; i < s.dof_count(); ++i) v[i] = f(s.node_coord(i));
    return Field(s, v);
}

Field p2_from(const FeSpace& s, const std::function<Vec2(Vec2)>& f) {
    Vector v(s.dof_count());
    for (int n = 0; n < s.node_count(); ++n) {
        const Vec2 u = f(s.node_coord(n));
        v[2 * n] = u.x;
        v[2 * n + 1] = u.y;
    }
    return Field(s, v);
}

// Independent per-element quadrature of a P1 field (oracle for 1^T M g).
double integrate_p1_oracle(const Field& g) {
    const Mesh& mesh = g.space->mesh();
    const QuadratureRule q = quadrature(2);
    double s = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        for (int k = 0; k < q.size(); ++k)
            s += q.weights[k] * geo.det * eval_p1(g, t, q.points[k]);
    }
    return s;
}

uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

TEST_CASE("P1 mass matrix: partition of unity and symmetry") {
    for (Rect r : {Rect{0, 0, 1, 1}, Rect{0, 0, 2, 1}}) {
        const Mesh mesh = build_structured_mesh(5, 4, r);
        const FeSpace s(mesh, SpaceKind::P1Scalar);
        const SparseMatrix m = assemble_mass(s);
        const Vector ones = Vector::Ones(s.dof_count());
        CHECK_THAT(ones.dot(m.apply(ones)), Catch::Matchers::WithinAbs(r.area(), 1e-12));
        CHECK(m.asymmetry() <= 1e-14);
    }
}

TEST_CASE("P1 mass matrix is positive definite") {
    const Mesh mesh = build_structured_mesh(3, 3);
    const FeSpace s(mesh, SpaceKind::P1Scalar);
    const Eigen::MatrixXd dense = assemble_mass(s).eigen();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("integral via mass matrix matches per-element quadrature") {
    const Mesh mesh = build_structured_mesh(9, 7, {0, 0, 1.5, 1.0});
    const FeSpace s(mesh, SpaceKind::P1Scalar);
    const SparseMatrix m = assemble_mass(s);
    Vector g(s.dof_count());
    for (int i = 0; i < s.dof_count(); ++i)
        g[i] = 2.0 * (double(splitmix(i) >> 11) / 9007199254740992.0) - 1.0;
    const Field gf(s, g);
    const double via_mass = m.apply(g).sum();
    CHECK_THAT(via_mass, Catch::Matchers::WithinAbs(integrate_p1_oracle(gf), 1e-12));
}

TEST_CASE("scalar stiffness annihilates constants and integrates |grad x|^2") {
    const Mesh mesh = build_structured_mesh(6, 5);
    const FeSpace s(mesh, SpaceKind::P1Scalar);
    const SparseMatrix k = assemble_stiffness(s);
    CHECK(k.asymmetry() <= 1e-14);
    CHECK(k.apply(Vector::Constant(s.dof_count(), 3.7)).lpNorm<Eigen::Infinity>() <= 1e-12);

    const Field x = p1_from(s, [](Vec2 p) { return p.x; });
    CHECK_THAT(x.coeffs.dot(k.apply(x.coeffs)), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("nonpositive stiffness coefficient is rejected") {
    const Mesh mesh = build_structured_mesh(2, 2);
    const FeSpace s(mesh, SpaceKind::P1Scalar);
    const Field bad = Field::constant(s, -1.0);
    CHECK_THROWS_AS(assemble_stiffness(s, bad), SolverError);
}

TEST_CASE("vector elastic form: shear field energy equals the domain area") {
    // u = (y, 0): E(u) has two off-diagonal 1/2 entries, 2 E:E = 1, so
    // int 2 eta E(u):E(u) = |Omega| for eta = 1.
    const Mesh mesh = build_structured_mesh(4, 4);
    const FeSpace v(mesh, SpaceKind::P2Vector2);
    const SparseMatrix a = assemble_stiffness(v);
    CHECK(a.asymmetry() <= 1e-13);
    const Field shear = p2_from(v, [](Vec2 p) { return Vec2{p.y, 0.0}; });
    CHECK_THAT(shear.coeffs.dot(a.apply(shear.coeffs)),
               Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("vector elastic form annihilates rigid motions") {
    const Mesh mesh = build_structured_mesh(3, 5, {0, 0, 2, 1});
    const FeSpace v(mesh, SpaceKind::P2Vector2);
    const SparseMatrix a = assemble_stiffness(v);
    const Field translation = p2_from(v, [](Vec2) { return Vec2{1.0, -2.0}; });
    const Field rotation = p2_from(v, [](Vec2 p) { return Vec2{-p.y, p.x}; });
    CHECK(a.apply(translation.coeffs).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(a.apply(rotation.coeffs).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("convection matrix basics") {
    const Mesh mesh = build_structured_mesh(5, 5);
    const FeSpace s(mesh, SpaceKind::P1Scalar);
    const FeSpace v(mesh, SpaceKind::P2Vector2);

    SECTION("zero velocity gives the zero matrix") {
        const SparseMatrix c = assemble_convection(s, Field::zero(v));
        CHECK(c.frobenius_norm() <= 1e-15);
    }
    SECTION("constants are in the kernel") {
        const Field u = p2_from(v, [](Vec2 p) { return Vec2{p.y + 0.3, p.x * p.x}; });
        const SparseMatrix c = assemble_convection(s, u);
        CHECK(c.apply(Vector::Ones(s.dof_count())).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
    SECTION("u=(1,0) against the field x integrates to |Omega|") {
        const Field u = p2_from(v, [](Vec2) { return Vec2{1.0, 0.0}; });
        const Field x = p1_from(s, [](Vec2 p) { return p.x; });
        const SparseMatrix c = assemble_convection(s, u);
        CHECK_THAT(c.apply(x.coeffs).sum(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
    SECTION("mismatched meshes are rejected") {
        const Mesh other = build_structured_mesh(2, 2);
        const FeSpace vo(other, SpaceKind::P2Vector2);
        CHECK_THROWS_AS(assemble_convection(s, Field::zero(vo)), ValidationError);
    }
}

TEST_CASE("divergence matrix basics") {
    const Mesh mesh = build_structured_mesh(4, 6, {0, 0, 2, 1});
    const FeSpace v(mesh, SpaceKind::P2Vector2);
    const FeSpace p(mesh, SpaceKind::P1Scalar);
    const SparseMatrix b = assemble_divergence(v, p);

    SECTION("rigid rotation is divergence-free") {
        const Field u = p2_from(v, [](Vec2 q) { return Vec2{-q.y, q.x}; });
        CHECK(b.apply(u.coeffs).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
    SECTION("u=(x,0) integrates div u to |Omega|") {
        const Field u = p2_from(v, [](Vec2 q) { return Vec2{q.x, 0.0}; });
        CHECK_THAT(b.apply(u.coeffs).sum(), Catch::Matchers::WithinAbs(2.0, 1e-12));
    }
    SECTION("zero field maps to zero") {
        CHECK(b.apply(Field::zero(v).coeffs).norm() == 0.0);
    }
}

TEST_CASE("P2 vector mass matrix integrates constants") {
    const Mesh mesh = build_structured_mesh(3, 3);
    const FeSpace v(mesh, SpaceKind::P2Vector2);
    const SparseMatrix m = assemble_mass(v);
    const Field ones = p2_from(v, [](Vec2) { return Vec2{1.0, 1.0}; });
    // int (1,1).(1,1) = 2 |Omega|
    CHECK_THAT(ones.coeffs.dot(m.apply(ones.coeffs)), Catch::Matchers::WithinAbs(2.0, 1e-12));
}

TEST_CASE("weighted mass matrix recovers the plain mass for unit weight") {
    const Mesh mesh = build_structured_mesh(3, 4);
    const FeSpace s(mesh, SpaceKind::P1Scalar);
    const Field c = p1_from(s, [](Vec2 p) { return p.x - p.y; });
    const SparseMatrix w =
        assemble_weighted_mass(s, c, [](double) { return 1.0; }, 6);
    const SparseMatrix m = assemble_mass(s);
    CHECK((Eigen::MatrixXd(w.eigen()) - Eigen::MatrixXd(m.eigen())).cwiseAbs().maxCoeff() <=
          1e-13);
}

// Discrete inf-sup probe: the smallest nonzero generalized singular value of
// the pressure Schur complement must not degenerate under refinement.
TEST_CASE("Taylor-Hood pair passes the inf-sup probe", "[infsup]") {
    std::vector<double> beta_h;
    for (int nx : {4, 8, 16}) {
        const Mesh mesh = build_structured_mesh(nx, nx);
        const FeSpace v(mesh, SpaceKind::P2Vector2);
        const FeSpace p(mesh, SpaceKind::P1Scalar);
        const SparseMatrix a = assemble_stiffness(v);
        const SparseMatrix b = assemble_divergence(v, p);
        const SparseMatrix mp = assemble_mass(p);

        // free velocity dofs: everything not on the boundary
        std::vector<int> free;
        {
            const auto bnodes = all_boundary_vertices(mesh);
            std::set<int> bset(bnodes.begin(), bnodes.end());
            for (const auto& be : mesh.boundary_edges)
                bset.insert(mesh.vertex_count() + be.edge);
            for (int n = 0; n < v.node_count(); ++n)
                if (!bset.count(n)) {
                    free.push_back(2 * n);
                    free.push_back(2 * n + 1);
                }
        }
        const int nf = static_cast<int>(free.size());
        const int np = p.dof_count();

        Eigen::MatrixXd af(nf, nf), bf(np, nf);
        const Eigen::MatrixXd ad = a.eigen();
        const Eigen::MatrixXd bd = b.eigen();
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < nf; ++j) af(i, j) = ad(free[i], free[j]);
        for (int k = 0; k < np; ++k)
            for (int j = 0; j < nf; ++j) bf(k, j) = bd(k, free[j]);

        const Eigen::MatrixXd schur = bf * af.llt().solve(bf.transpose());
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
            schur, Eigen::MatrixXd(mp.eigen()));
        const auto& ev = ges.eigenvalues();
        // smallest eigenvalue is the spurious constant-pressure mode
        CHECK(std::abs(ev[0]) < 1e-10);
        REQUIRE(ev[1] > 0.0);
        beta_h.push_back(std::sqrt(ev[1]));
    }
    INFO("beta_h = " << beta_h[0] << ", " << beta_h[1] << ", " << beta_h[2]);
    CHECK(beta_h[1] / beta_h[0] >= 0.8);
    CHECK(beta_h[2] / beta_h[1] >= 0.8);
}
