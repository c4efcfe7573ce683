#pragma once
// Lagrange finite element spaces on a triangulated rectangle:
//   P1Scalar          - one dof per vertex (c, mu, Theta)
//   P1PressureZeroMean- vertex dofs; the zero-mean constraint is enforced
//                       at the Stokes solve through a multiplier row
//   P2Vector2         - two dofs per vertex and per edge midpoint,
//                       interleaved (node n -> dofs 2n, 2n+1)

#include <array>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "chs/mesh.hpp"
#include "chs/sparse.hpp"

namespace chs {

enum class SpaceKind { P1Scalar, P1PressureZeroMean, P2Vector2 };

class FeSpace {
public:
    FeSpace(const Mesh& mesh, SpaceKind kind) : mesh_(&mesh), kind_(kind) {
        const int nodes = (kind == SpaceKind::P2Vector2)
                              ? mesh.vertex_count() + mesh.edge_count()
                              : mesh.vertex_count();
        node_count_ = nodes;
        dof_count_ = (kind == SpaceKind::P2Vector2) ? 2 * nodes : nodes;
    }

    const Mesh& mesh() const { return *mesh_; }
    SpaceKind kind() const { return kind_; }
    int dof_count() const { return dof_count_; }
    int node_count() const { return node_count_; }
    bool is_vector() const { return kind_ == SpaceKind::P2Vector2; }

    // Geometric location of a node (vertex or, for P2, edge midpoint).
    Vec2 node_coord(int n) const {
        if (n < mesh_->vertex_count()) return mesh_->vertices[n];
        return mesh_->edge_midpoint(n - mesh_->vertex_count());
    }

    // Local node -> global node for one triangle: 3 vertices then the 3
    // midpoints of the edges opposite those vertices.
    std::array<int, 6> p2_nodes(int t) const {
        const auto& tri = mesh_->triangles[t];
        const auto& te = mesh_->triangle_edges[t];
        const int V = mesh_->vertex_count();
        return {tri[0], tri[1], tri[2], V + te[0], V + te[1], V + te[2]};
    }

    void set_constraints(DirichletConstraints c) { constraints_ = std::move(c); }
    const DirichletConstraints& constraints() const { return constraints_; }

private:
    const Mesh* mesh_;
    SpaceKind kind_;
    int node_count_ = 0;
    int dof_count_ = 0;
    DirichletConstraints constraints_;
};

// Coefficient vector bound to a space.
struct Field {
    const FeSpace* space = nullptr;
    Vector coeffs;

    Field() = default;
    Field(const FeSpace& s, Vector c) : space(&s), coeffs(std::move(c)) {
        if (coeffs.size() != s.dof_count())
            throw ValidationError("Field: coefficient length does not match space dof count");
    }

    static Field zero(const FeSpace& s) { return Field(s, Vector::Zero(s.dof_count())); }
    static Field constant(const FeSpace& s, double v) {
        return Field(s, Vector::Constant(s.dof_count(), v));
    }
};

// --- reference-element bases (barycentric coordinates l0,l1,l2) ---------

inline std::array<double, 3> p1_values(const std::array<double, 3>& l) {
    return {l[0], l[1], l[2]};
}

// Reference gradients of the barycentric coordinates on the unit triangle.
inline constexpr std::array<Vec2, 3> kBaryRefGrad = {Vec2{-1.0, -1.0}, Vec2{1.0, 0.0},
                                                     Vec2{0.0, 1.0}};

inline std::array<double, 6> p2_values(const std::array<double, 3>& l) {
    return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[1] * l[2], 4.0 * l[2] * l[0], 4.0 * l[0] * l[1]};
}

inline std::array<Vec2, 6> p2_ref_gradients(const std::array<double, 3>& l) {
    std::array<Vec2, 6> g;
    for (int i = 0; i < 3; ++i) g[i] = (4.0 * l[i] - 1.0) * kBaryRefGrad[i];
    g[3] = 4.0 * (l[1] * kBaryRefGrad[2] + l[2] * kBaryRefGrad[1]);
    g[4] = 4.0 * (l[2] * kBaryRefGrad[0] + l[0] * kBaryRefGrad[2]);
    g[5] = 4.0 * (l[0] * kBaryRefGrad[1] + l[1] * kBaryRefGrad[0]);
    return g;
}

// Affine map data for one triangle.
struct ElementGeometry {
    std::array<Vec2, 3> p;
    double a, b, c, d;  // columns of the Jacobian [p1-p0 | p2-p0]
    double det;

    explicit ElementGeometry(const Mesh& mesh, int t) {
        const auto& tri = mesh.triangles[t];
        p = {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
        a = p[1].x - p[0].x;
        c = p[1].y - p[0].y;
        b = p[2].x - p[0].x;
        d = p[2].y - p[0].y;
        det = a * d - b * c;  // = 2 * area, positive for CCW triangles
    }

    Vec2 point(const std::array<double, 3>& l) const {
        return l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
    }

    // Physical gradient J^{-T} g_ref.
    Vec2 grad(Vec2 g) const {
        return {(d * g.x - c * g.y) / det, (-b * g.x + a * g.y) / det};
    }

    std::array<Vec2, 3> p1_gradients() const {
        return {grad(kBaryRefGrad[0]), grad(kBaryRefGrad[1]), grad(kBaryRefGrad[2])};
    }
};

// --- field evaluation at a quadrature point of a triangle ---------------

inline double eval_p1(const Field& f, int t, const std::array<double, 3>& l) {
    const auto& tri = f.space->mesh().triangles[t];
    return l[0] * f.coeffs[tri[0]] + l[1] * f.coeffs[tri[1]] + l[2] * f.coeffs[tri[2]];
}

inline Vec2 eval_p2_vector(const Field& f, int t, const std::array<double, 3>& l) {
    const auto nodes = f.space->p2_nodes(t);
    const auto phi = p2_values(l);
    Vec2 u{0.0, 0.0};
    for (int n = 0; n < 6; ++n) {
        u.x += f.coeffs[2 * nodes[n]] * phi[n];
        u.y += f.coeffs[2 * nodes[n] + 1] * phi[n];
    }
    return u;
}

// --- strong Dirichlet constraint builders --------------------------------

// Scalar Dirichlet values on the given segments; corners shared by two
// Dirichlet segments take the value of the later tag in enum order.
inline DirichletConstraints scalar_dirichlet(const FeSpace& space,
                                             const std::map<SegmentTag, double>& values) {
    DirichletConstraints out;
    for (const auto& [tag, value] : values)
        for (int v : boundary_vertices(space.mesh(), {tag})) out.set(v, value);
    return out;
}

// No-slip on `dirichlet_tags`; if a lid is given, its quartic tangential
// profile is sampled at the vertex and midpoint nodes of the lid segment.
// No-slip wins at corners (the profile vanishes there by construction).
inline DirichletConstraints velocity_dirichlet(
    const FeSpace& space, const std::set<SegmentTag>& dirichlet_tags,
    const std::optional<LidSpec>& lid,
    const std::function<Vec2(double)>& lid_profile_at_x) {
    if (space.kind() != SpaceKind::P2Vector2)
        throw ValidationError("velocity_dirichlet: needs a P2 vector space");
    const Mesh& mesh = space.mesh();
    const int V = mesh.vertex_count();
    DirichletConstraints out;

    auto constrain_node = [&](int node, Vec2 value) {
        out.set(2 * node, value.x);
        out.set(2 * node + 1, value.y);
    };

    if (lid) {
        for (const auto& be : mesh.boundary_edges) {
            if (be.tag != lid->segment) continue;
            constrain_node(be.v0, lid_profile_at_x(mesh.vertices[be.v0].x));
            constrain_node(be.v1, lid_profile_at_x(mesh.vertices[be.v1].x));
            constrain_node(V + be.edge, lid_profile_at_x(mesh.edge_midpoint(be.edge).x));
        }
    }
    for (const auto& be : mesh.boundary_edges) {
        if (!dirichlet_tags.count(be.tag)) continue;
        if (lid && be.tag == lid->segment) continue;
        constrain_node(be.v0, {0.0, 0.0});
        constrain_node(be.v1, {0.0, 0.0});
        constrain_node(V + be.edge, {0.0, 0.0});
    }
    return out;
}

}  // namespace chs
