#pragma once
// Structured triangulations of axis-aligned rectangles with tagged
// boundary segments Gamma1 (bottom), Gamma2 (right), Gamma3 (top),
// Gamma4 (left), labelled counter-clockwise from the bottom side.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chs/errors.hpp"

namespace chs {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

enum class SegmentTag : int { Gamma1 = 0, Gamma2 = 1, Gamma3 = 2, Gamma4 = 3 };

inline const char* to_string(SegmentTag t) {
    switch (t) {
        case SegmentTag::Gamma1: return "g1";
        case SegmentTag::Gamma2: return "g2";
        case SegmentTag::Gamma3: return "g3";
        case SegmentTag::Gamma4: return "g4";
    }
    return "?";
}

struct BoundaryEdge {
    int v0 = -1;
    int v1 = -1;
    int edge = -1;  // index into Mesh::edges
    SegmentTag tag = SegmentTag::Gamma1;
};

struct Mesh {
    Rect rect;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;      // counter-clockwise
    std::vector<std::array<int, 2>> edges;          // unique, v0 < v1
    std::vector<std::array<int, 3>> triangle_edges; // local edge e opposite vertex e
    std::vector<BoundaryEdge> boundary_edges;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    Vec2 edge_midpoint(int e) const {
        const auto& [a, b] = edges[e];
        return 0.5 * (vertices[a] + vertices[b]);
    }

    double triangle_area(int t) const {
        const auto& tri = triangles[t];
        return 0.5 * cross(vertices[tri[1]] - vertices[tri[0]],
                           vertices[tri[2]] - vertices[tri[0]]);
    }

    double geometry_tolerance() const {
        return 1e-12 * std::max({std::abs(rect.width()), std::abs(rect.height()), 1.0});
    }
};

// Re-derives segment tags of all boundary edges from geometry. Idempotent.
// Throws if a boundary edge does not lie on one of the four rectangle sides.
inline Mesh tag_segments(Mesh mesh) {
    const double tol = mesh.geometry_tolerance();
    auto on = [tol](double v, double ref) { return std::abs(v - ref) <= tol; };
    for (auto& be : mesh.boundary_edges) {
        const Vec2 a = mesh.vertices[be.v0];
        const Vec2 b = mesh.vertices[be.v1];
        if (on(a.y, mesh.rect.y0) && on(b.y, mesh.rect.y0)) {
            be.tag = SegmentTag::Gamma1;
        } else if (on(a.x, mesh.rect.x1) && on(b.x, mesh.rect.x1)) {
            be.tag = SegmentTag::Gamma2;
        } else if (on(a.y, mesh.rect.y1) && on(b.y, mesh.rect.y1)) {
            be.tag = SegmentTag::Gamma3;
        } else if (on(a.x, mesh.rect.x0) && on(b.x, mesh.rect.x0)) {
            be.tag = SegmentTag::Gamma4;
        } else {
            throw ValidationError("tag_segments: boundary edge (" +
                                  std::to_string(be.v0) + "," + std::to_string(be.v1) +
                                  ") lies on no rectangle side");
        }
    }
    return mesh;
}

// Builds the uniform nx-by-ny triangulation of `rect`; every cell is split
// along its bottom-left to top-right diagonal. (nx+1)(ny+1) vertices,
// 2*nx*ny triangles.
inline Mesh build_structured_mesh(int nx, int ny, Rect rect = {}) {
    if (nx < 1 || ny < 1)
        throw ValidationError("build_structured_mesh: subdivision counts must be >= 1");
    if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0))
        throw ValidationError("build_structured_mesh: degenerate rectangle");

    Mesh mesh;
    mesh.rect = rect;

    const int npx = nx + 1;
    const int npy = ny + 1;
    mesh.vertices.reserve(static_cast<size_t>(npx) * npy);
    for (int j = 0; j < npy; ++j) {
        // Boundary coordinates are snapped exactly onto the rectangle sides.
        const double y = (j == ny) ? rect.y1 : rect.y0 + rect.height() * j / ny;
        for (int i = 0; i < npx; ++i) {
            const double x = (i == nx) ? rect.x1 : rect.x0 + rect.width() * i / nx;
            mesh.vertices.push_back({x, y});
        }
    }

    auto vid = [npx](int i, int j) { return j * npx + i; };
    mesh.triangles.reserve(static_cast<size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v00 = vid(i, j);
            const int v10 = vid(i + 1, j);
            const int v01 = vid(i, j + 1);
            const int v11 = vid(i + 1, j + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }

    // Unique edge enumeration in first-encounter order; local edge e of a
    // triangle connects the two vertices other than vertex e.
    std::map<std::pair<int, int>, int> edge_ids;
    std::vector<int> incidence;
    mesh.triangle_edges.resize(mesh.triangles.size());
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int e = 0; e < 3; ++e) {
            const int a = tri[(e + 1) % 3];
            const int b = tri[(e + 2) % 3];
            const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
            auto [it, inserted] = edge_ids.try_emplace(key, mesh.edge_count());
            if (inserted) {
                mesh.edges.push_back({key.first, key.second});
                incidence.push_back(0);
            }
            mesh.triangle_edges[t][e] = it->second;
            ++incidence[it->second];
        }
    }

    for (int e = 0; e < mesh.edge_count(); ++e) {
        if (incidence[e] == 1)
            mesh.boundary_edges.push_back({mesh.edges[e][0], mesh.edges[e][1], e,
                                           SegmentTag::Gamma1});
    }
    mesh = tag_segments(std::move(mesh));

    // Structural sanity on construction.
    double area_sum = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const double a = mesh.triangle_area(t);
        if (!(a > 0.0))
            throw ValidationError("build_structured_mesh: nonpositive triangle area");
        area_sum += a;
    }
    if (std::abs(area_sum - rect.area()) > 1e-12 * rect.area())
        throw ValidationError("build_structured_mesh: triangle areas do not sum to the rectangle area");

    return mesh;
}

// All vertices incident to a boundary edge whose tag is in `tags`.
// Corner vertices show up for both adjacent segments.
inline std::set<int> boundary_vertices(const Mesh& mesh, const std::set<SegmentTag>& tags) {
    std::set<int> out;
    for (const auto& be : mesh.boundary_edges) {
        if (tags.count(be.tag)) {
            out.insert(be.v0);
            out.insert(be.v1);
        }
    }
    return out;
}

inline std::set<int> all_boundary_vertices(const Mesh& mesh) {
    return boundary_vertices(mesh, {SegmentTag::Gamma1, SegmentTag::Gamma2,
                                    SegmentTag::Gamma3, SegmentTag::Gamma4});
}

// Velocity/temperature boundary partition for one run. Velocity Dirichlet
// and traction-free sets partition {Gamma1..Gamma4}; likewise the thermal
// Dirichlet/insulated sets. The optional lid names a Dirichlet segment that
// carries an inhomogeneous tangential profile instead of no-slip.
struct LidSpec {
    SegmentTag segment = SegmentTag::Gamma3;
    double gamma = 16.0;  // profile amplitude
};

struct BoundarySpec {
    std::set<SegmentTag> velocity_dirichlet;
    std::set<SegmentTag> velocity_traction_free;
    std::map<SegmentTag, double> theta_dirichlet;  // segment -> prescribed value
    std::set<SegmentTag> theta_insulated;
    std::optional<LidSpec> lid;

    bool stokes_enclosed() const { return velocity_traction_free.empty(); }

    void validate() const {
        const std::set<SegmentTag> all{SegmentTag::Gamma1, SegmentTag::Gamma2,
                                       SegmentTag::Gamma3, SegmentTag::Gamma4};
        std::set<SegmentTag> vel = velocity_dirichlet;
        for (SegmentTag t : velocity_traction_free)
            if (!vel.insert(t).second)
                throw ValidationError("BoundarySpec: velocity sets overlap on " +
                                      std::string(to_string(t)));
        if (vel != all)
            throw ValidationError("BoundarySpec: velocity sets do not cover all four segments");

        std::set<SegmentTag> th = theta_insulated;
        for (const auto& [t, v] : theta_dirichlet) {
            (void)v;
            if (!th.insert(t).second)
                throw ValidationError("BoundarySpec: temperature sets overlap on " +
                                      std::string(to_string(t)));
        }
        if (th != all)
            throw ValidationError("BoundarySpec: temperature sets do not cover all four segments");

        if (lid && !velocity_dirichlet.count(lid->segment))
            throw ValidationError("BoundarySpec: lid segment must be velocity-Dirichlet");
    }
};

}  // namespace chs
