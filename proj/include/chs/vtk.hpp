#pragma once
// Legacy-VTK (ASCII unstructured grid) writers. Output is byte-deterministic
// for a given state: fixed field order, '%.17g' reals, LF line endings.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "chs/driver.hpp"
#include "chs/text.hpp"

namespace chs {

namespace detail {

inline void vtk_header(std::string& out, const Mesh& mesh, const std::string& title) {
    out += "# vtk DataFile Version 3.0\n";
    out += title;
    out += "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out += "POINTS " + std::to_string(mesh.vertex_count()) + " double\n";
    for (const Vec2& p : mesh.vertices)
        out += format_double(p.x) + " " + format_double(p.y) + " 0\n";
    out += "CELLS " + std::to_string(mesh.triangle_count()) + " " +
           std::to_string(4 * mesh.triangle_count()) + "\n";
    for (const auto& t : mesh.triangles)
        out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
               std::to_string(t[2]) + "\n";
    out += "CELL_TYPES " + std::to_string(mesh.triangle_count()) + "\n";
    for (int t = 0; t < mesh.triangle_count(); ++t) out += "5\n";
}

inline void vtk_scalar(std::string& out, const std::string& name, const Vector& values,
                       int count) {
    out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < count; ++i) out += format_double(values[i]) + "\n";
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw Error("write failed for '" + path + "'");
}

}  // namespace detail

// Snapshot with point data c, mu, theta, p and the velocity sampled at the
// mesh vertices (the P2 field carries vertex dofs directly).
inline std::string vtk_snapshot_text(const Mesh& mesh, const SimState& state) {
    std::string out;
    detail::vtk_header(out, mesh, "chs2d snapshot step " + std::to_string(state.step) +
                                      " t " + detail::format_double(state.time));
    const int nv = mesh.vertex_count();
    out += "POINT_DATA " + std::to_string(nv) + "\n";
    detail::vtk_scalar(out, "c", state.c.coeffs, nv);
    detail::vtk_scalar(out, "mu", state.mu.coeffs, nv);
    detail::vtk_scalar(out, "theta", state.theta.coeffs, nv);
    detail::vtk_scalar(out, "p", state.pressure.coeffs, nv);
    out += "VECTORS u double\n";
    for (int v = 0; v < nv; ++v)
        out += detail::format_double(state.velocity.coeffs[2 * v]) + " " +
               detail::format_double(state.velocity.coeffs[2 * v + 1]) + " 0\n";
    return out;
}

inline void write_vtk(const Mesh& mesh, const SimState& state, const std::string& path) {
    detail::write_text_file(path, vtk_snapshot_text(mesh, state));
}

// Bare mesh dump for inspection.
inline void write_mesh_vtk(const Mesh& mesh, const std::string& path) {
    std::string out;
    detail::vtk_header(out, mesh, "chs2d mesh");
    detail::write_text_file(path, out);
}

}  // namespace chs
