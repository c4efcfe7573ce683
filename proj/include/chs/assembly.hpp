#pragma once
// Global matrix/vector assembly over the triangulation. Single-threaded
// element loops in index order keep every result bit-deterministic.
//
// Quadrature degrees follow the integrand: 2 for constant-coefficient P1
// bilinear forms, 4 for convection and variable-coefficient forms, 6 for
// the quartic bulk terms of the phase-field residual.

#include <functional>
#include <vector>

#include "chs/fe_space.hpp"
#include "chs/quadrature.hpp"

namespace chs {

namespace detail {

inline void require_same_mesh(const FeSpace& a, const FeSpace& b, const char* who) {
    if (&a.mesh() != &b.mesh())
        throw ValidationError(std::string(who) + ": spaces live on different meshes");
}

}  // namespace detail

// Mass matrix: scalar P1 (degree 2) or P2 vector (degree 4).
inline SparseMatrix assemble_mass(const FeSpace& space) {
    const Mesh& mesh = space.mesh();
    std::vector<Triplet> trips;
    if (!space.is_vector()) {
        const QuadratureRule q = quadrature(2);
        trips.reserve(mesh.triangles.size() * 9);
        for (int t = 0; t < mesh.triangle_count(); ++t) {
            const ElementGeometry geo(mesh, t);
            const auto& tri = mesh.triangles[t];
            for (int k = 0; k < q.size(); ++k) {
                const auto phi = p1_values(q.points[k]);
                const double w = q.weights[k] * geo.det;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        trips.emplace_back(tri[i], tri[j], w * phi[i] * phi[j]);
            }
        }
    } else {
        const QuadratureRule q = quadrature(4);
        trips.reserve(mesh.triangles.size() * 72);
        for (int t = 0; t < mesh.triangle_count(); ++t) {
            const ElementGeometry geo(mesh, t);
            const auto nodes = space.p2_nodes(t);
            for (int k = 0; k < q.size(); ++k) {
                const auto phi = p2_values(q.points[k]);
                const double w = q.weights[k] * geo.det;
                for (int i = 0; i < 6; ++i)
                    for (int j = 0; j < 6; ++j) {
                        const double v = w * phi[i] * phi[j];
                        trips.emplace_back(2 * nodes[i], 2 * nodes[j], v);
                        trips.emplace_back(2 * nodes[i] + 1, 2 * nodes[j] + 1, v);
                    }
            }
        }
    }
    return SparseMatrix(space.dof_count(), space.dof_count(), trips);
}

// Scalar stiffness with coefficient evaluated per quadrature point.
// P1 coefficient fields are interpolated; nonpositive values are rejected.
inline SparseMatrix assemble_stiffness_scalar(
    const FeSpace& space, const std::function<double(int, const std::array<double, 3>&)>& coeff,
    int degree) {
    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(degree);
    std::vector<Triplet> trips;
    trips.reserve(mesh.triangles.size() * 9);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& tri = mesh.triangles[t];
        const auto g = geo.p1_gradients();
        for (int k = 0; k < q.size(); ++k) {
            const double kappa = coeff(t, q.points[k]);
            if (!(kappa > 0.0))
                throw SolverError("assemble_stiffness: nonpositive coefficient " +
                                  std::to_string(kappa) + " at a quadrature point");
            const double w = q.weights[k] * geo.det * kappa;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    trips.emplace_back(tri[i], tri[j], w * dot(g[i], g[j]));
        }
    }
    return SparseMatrix(space.dof_count(), space.dof_count(), trips);
}

// Vector form: 2 eta(x) * E(u):E(v) with per-point viscosity.
inline SparseMatrix assemble_stiffness_vector(
    const FeSpace& space, const std::function<double(int, const std::array<double, 3>&)>& eta,
    int degree) {
    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(degree);
    std::vector<Triplet> trips;
    trips.reserve(mesh.triangles.size() * 144);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto nodes = space.p2_nodes(t);
        for (int k = 0; k < q.size(); ++k) {
            const double e = eta(t, q.points[k]);
            if (!(e > 0.0))
                throw SolverError("assemble_stiffness: nonpositive viscosity " +
                                  std::to_string(e) + " at a quadrature point");
            const double w = q.weights[k] * geo.det * e;
            const auto gref = p2_ref_gradients(q.points[k]);
            std::array<Vec2, 6> g;
            for (int n = 0; n < 6; ++n) g[n] = geo.grad(gref[n]);
            // For basis fields a = e_d phi_n, b = e_e phi_m:
            //   2 E(a):E(b) = delta_de (grad phi_n . grad phi_m)
            //               + (grad phi_n)[e] (grad phi_m)[d]
            for (int n = 0; n < 6; ++n)
                for (int m = 0; m < 6; ++m) {
                    const double gdot = dot(g[n], g[m]);
                    const double gx_n[2] = {g[n].x, g[n].y};
                    const double gx_m[2] = {g[m].x, g[m].y};
                    for (int d = 0; d < 2; ++d)
                        for (int e2 = 0; e2 < 2; ++e2) {
                            const double val = (d == e2 ? gdot : 0.0) + gx_n[e2] * gx_m[d];
                            trips.emplace_back(2 * nodes[n] + d, 2 * nodes[m] + e2, w * val);
                        }
                }
        }
    }
    return SparseMatrix(space.dof_count(), space.dof_count(), trips);
}

inline std::function<double(int, const std::array<double, 3>&)> constant_coeff(double v) {
    return [v](int, const std::array<double, 3>&) { return v; };
}

inline std::function<double(int, const std::array<double, 3>&)> p1_coeff(const Field& f) {
    return [&f](int t, const std::array<double, 3>& l) { return eval_p1(f, t, l); };
}

// Stiffness entry points per the space kind: scalar gradient form for P1,
// symmetric-gradient (2 eta E:E) form for the P2 vector space.
inline SparseMatrix assemble_stiffness(const FeSpace& space, double coeff = 1.0) {
    return space.is_vector() ? assemble_stiffness_vector(space, constant_coeff(coeff), 2)
                             : assemble_stiffness_scalar(space, constant_coeff(coeff), 2);
}

inline SparseMatrix assemble_stiffness(const FeSpace& space, const Field& coeff) {
    detail::require_same_mesh(space, *coeff.space, "assemble_stiffness");
    return space.is_vector() ? assemble_stiffness_vector(space, p1_coeff(coeff), 4)
                             : assemble_stiffness_scalar(space, p1_coeff(coeff), 4);
}

// Convection matrix on a scalar space: C[i,j] = int (u . grad phi_j) phi_i.
inline SparseMatrix assemble_convection(const FeSpace& space, const Field& velocity) {
    if (space.is_vector())
        throw ValidationError("assemble_convection: expected a scalar space");
    if (velocity.space->kind() != SpaceKind::P2Vector2)
        throw ValidationError("assemble_convection: velocity must be P2Vector2");
    detail::require_same_mesh(space, *velocity.space, "assemble_convection");

    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(4);
    std::vector<Triplet> trips;
    trips.reserve(mesh.triangles.size() * 9);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& tri = mesh.triangles[t];
        const auto g = geo.p1_gradients();
        for (int k = 0; k < q.size(); ++k) {
            const Vec2 u = eval_p2_vector(velocity, t, q.points[k]);
            const auto phi = p1_values(q.points[k]);
            const double w = q.weights[k] * geo.det;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    trips.emplace_back(tri[i], tri[j], w * phi[i] * dot(u, g[j]));
        }
    }
    return SparseMatrix(space.dof_count(), space.dof_count(), trips);
}

// Divergence coupling: B[k, j] = int q_k (div phi_j), pressure rows by
// velocity columns.
inline SparseMatrix assemble_divergence(const FeSpace& v_space, const FeSpace& p_space) {
    if (v_space.kind() != SpaceKind::P2Vector2 || p_space.is_vector())
        throw ValidationError("assemble_divergence: expected (P2Vector2, P1) spaces");
    detail::require_same_mesh(v_space, p_space, "assemble_divergence");

    const Mesh& mesh = v_space.mesh();
    const QuadratureRule q = quadrature(2);
    std::vector<Triplet> trips;
    trips.reserve(mesh.triangles.size() * 36);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& tri = mesh.triangles[t];
        const auto nodes = v_space.p2_nodes(t);
        for (int k = 0; k < q.size(); ++k) {
            const auto qv = p1_values(q.points[k]);
            const auto gref = p2_ref_gradients(q.points[k]);
            const double w = q.weights[k] * geo.det;
            for (int n = 0; n < 6; ++n) {
                const Vec2 g = geo.grad(gref[n]);
                const double gd[2] = {g.x, g.y};
                for (int i = 0; i < 3; ++i)
                    for (int d = 0; d < 2; ++d)
                        trips.emplace_back(tri[i], 2 * nodes[n] + d, w * qv[i] * gd[d]);
            }
        }
    }
    return SparseMatrix(p_space.dof_count(), v_space.dof_count(), trips);
}

// Weighted mass matrix on P1: int w(c(x)) phi_i phi_j with the weight
// computed from an interpolated P1 field.
inline SparseMatrix assemble_weighted_mass(const FeSpace& space, const Field& c,
                                           const std::function<double(double)>& weight,
                                           int degree) {
    if (space.is_vector())
        throw ValidationError("assemble_weighted_mass: expected a scalar space");
    detail::require_same_mesh(space, *c.space, "assemble_weighted_mass");
    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(degree);
    std::vector<Triplet> trips;
    trips.reserve(mesh.triangles.size() * 9);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < q.size(); ++k) {
            const double w = q.weights[k] * geo.det * weight(eval_p1(c, t, q.points[k]));
            const auto phi = p1_values(q.points[k]);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    trips.emplace_back(tri[i], tri[j], w * phi[i] * phi[j]);
        }
    }
    return SparseMatrix(space.dof_count(), space.dof_count(), trips);
}

// Scalar load vectors: int f phi_i with f given by position or built from
// one or two interpolated P1 fields.
inline Vector assemble_load(const FeSpace& space, const std::function<double(Vec2)>& f,
                            int degree) {
    Vector out = Vector::Zero(space.dof_count());
    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(degree);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < q.size(); ++k) {
            const double w = q.weights[k] * geo.det * f(geo.point(q.points[k]));
            const auto phi = p1_values(q.points[k]);
            for (int i = 0; i < 3; ++i) out[tri[i]] += w * phi[i];
        }
    }
    return out;
}

inline Vector assemble_load(const FeSpace& space, const Field& a,
                            const std::function<double(double)>& f, int degree) {
    detail::require_same_mesh(space, *a.space, "assemble_load");
    Vector out = Vector::Zero(space.dof_count());
    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(degree);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < q.size(); ++k) {
            const double w = q.weights[k] * geo.det * f(eval_p1(a, t, q.points[k]));
            const auto phi = p1_values(q.points[k]);
            for (int i = 0; i < 3; ++i) out[tri[i]] += w * phi[i];
        }
    }
    return out;
}

inline Vector assemble_load(const FeSpace& space, const Field& a, const Field& b,
                            const std::function<double(double, double)>& f, int degree) {
    detail::require_same_mesh(space, *a.space, "assemble_load");
    detail::require_same_mesh(space, *b.space, "assemble_load");
    Vector out = Vector::Zero(space.dof_count());
    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(degree);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < q.size(); ++k) {
            const double w = q.weights[k] * geo.det *
                             f(eval_p1(a, t, q.points[k]), eval_p1(b, t, q.points[k]));
            const auto phi = p1_values(q.points[k]);
            for (int i = 0; i < 3; ++i) out[tri[i]] += w * phi[i];
        }
    }
    return out;
}

// Vector load on the P2 space: int f(x) . v for a position-dependent force.
inline Vector assemble_vector_load(const FeSpace& space, const std::function<Vec2(Vec2)>& f,
                                   int degree) {
    if (!space.is_vector())
        throw ValidationError("assemble_vector_load: expected the P2 vector space");
    Vector out = Vector::Zero(space.dof_count());
    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(degree);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto nodes = space.p2_nodes(t);
        for (int k = 0; k < q.size(); ++k) {
            const Vec2 fv = f(geo.point(q.points[k]));
            const double w = q.weights[k] * geo.det;
            const auto phi = p2_values(q.points[k]);
            for (int n = 0; n < 6; ++n) {
                out[2 * nodes[n]] += w * fv.x * phi[n];
                out[2 * nodes[n] + 1] += w * fv.y * phi[n];
            }
        }
    }
    return out;
}

// Buoyancy load: int (g_scaled * density(c(x))) . v with a P1 order
// parameter and a caller-supplied density law.
inline Vector assemble_buoyancy(const FeSpace& space, const Field& c,
                                const std::function<double(double)>& density, Vec2 g_scaled) {
    if (!space.is_vector())
        throw ValidationError("assemble_buoyancy: expected the P2 vector space");
    detail::require_same_mesh(space, *c.space, "assemble_buoyancy");
    Vector out = Vector::Zero(space.dof_count());
    const Mesh& mesh = space.mesh();
    const QuadratureRule q = quadrature(4);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto nodes = space.p2_nodes(t);
        for (int k = 0; k < q.size(); ++k) {
            const double rho = density(eval_p1(c, t, q.points[k]));
            const double w = q.weights[k] * geo.det * rho;
            const auto phi = p2_values(q.points[k]);
            for (int n = 0; n < 6; ++n) {
                out[2 * nodes[n]] += w * g_scaled.x * phi[n];
                out[2 * nodes[n] + 1] += w * g_scaled.y * phi[n];
            }
        }
    }
    return out;
}

// int q_k dx for every pressure basis function (the zero-mean multiplier row).
inline Vector assemble_unit_load(const FeSpace& space) {
    return assemble_load(space, [](Vec2) { return 1.0; }, 2);
}

}  // namespace chs
