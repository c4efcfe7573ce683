#pragma once
// Conserved/dissipated quantities and geometric observables: total mass,
// the discrete Cahn-Hilliard free energy, L2 statistics, level-set
// extraction on P1 fields, and the heavy-phase centroid height.

#include <Eigen/SparseCholesky>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "chs/assembly.hpp"
#include "chs/physics.hpp"

namespace chs {

// int c dx computed through the P1 mass matrix (1^T M c).
inline double total_mass(const Field& c, const SparseMatrix* cached_mass = nullptr) {
    if (cached_mass) return cached_mass->apply(c.coeffs).sum();
    return assemble_mass(*c.space).apply(c.coeffs).sum();
}

// E_h(c) = int ( 2 c^4 - (1 - beta_bar) c^2 + (Ch^2/2) |grad c|^2 ) dx,
// degree-6 quadrature.
inline double discrete_energy(const Field& c, double beta_bar, double ch) {
    const Mesh& mesh = c.space->mesh();
    const QuadratureRule q = quadrature(6);
    double energy = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        const auto& tri = mesh.triangles[t];
        const auto g = geo.p1_gradients();
        const Vec2 grad_c = c.coeffs[tri[0]] * g[0] + c.coeffs[tri[1]] * g[1] +
                            c.coeffs[tri[2]] * g[2];
        const double grad_term = 0.5 * ch * ch * dot(grad_c, grad_c);
        for (int k = 0; k < q.size(); ++k) {
            const double cv = eval_p1(c, t, q.points[k]);
            energy += q.weights[k] * geo.det * (bulk_f(cv, beta_bar) + grad_term);
        }
    }
    return energy;
}

// Mass-weighted mean and L2 variance of a P1 field.
inline double field_mean(const Field& c, const SparseMatrix& mass, double domain_area) {
    return mass.apply(c.coeffs).sum() / domain_area;
}

inline double field_variance(const Field& c, const SparseMatrix& mass, double domain_area) {
    const double mean = field_mean(c, mass, domain_area);
    return c.coeffs.dot(mass.apply(c.coeffs)) / domain_area - mean * mean;
}

// --- level-set extraction (marching triangles) ----------------------------

using Polyline = std::vector<Vec2>;

namespace detail {

// Interface points are keyed by the mesh entity carrying them, so segments
// from neighbouring triangles share endpoints exactly.
struct CrossingKey {
    int kind;   // 0 = mesh vertex, 1 = edge interior
    int index;  // vertex id or edge id
    bool operator<(const CrossingKey& o) const {
        return std::tie(kind, index) < std::tie(o.kind, o.index);
    }
    bool operator==(const CrossingKey& o) const {
        return kind == o.kind && index == o.index;
    }
};

}  // namespace detail

// Extracts the level set {c = level} of a P1 field as joined polylines.
inline std::vector<Polyline> extract_interface(const Field& c, double level) {
    const Mesh& mesh = c.space->mesh();
    using detail::CrossingKey;

    // Crossing point on a global edge, interpolated in a fixed vertex order
    // so both adjacent triangles produce bit-identical coordinates.
    std::map<int, Vec2> edge_points;
    auto edge_crossing = [&](int e) {
        auto it = edge_points.find(e);
        if (it != edge_points.end()) return it->second;
        const auto& [a, b] = mesh.edges[e];
        const double ca = c.coeffs[a], cb = c.coeffs[b];
        const double t = (level - ca) / (cb - ca);
        const Vec2 p = mesh.vertices[a] + t * (mesh.vertices[b] - mesh.vertices[a]);
        edge_points.emplace(e, p);
        return p;
    };

    std::map<std::pair<CrossingKey, CrossingKey>, std::pair<Vec2, Vec2>> segments;
    auto add_segment = [&](CrossingKey ka, Vec2 pa, CrossingKey kb, Vec2 pb) {
        if (ka == kb) return;
        if (kb < ka) {
            std::swap(ka, kb);
            std::swap(pa, pb);
        }
        segments.emplace(std::make_pair(ka, kb), std::make_pair(pa, pb));
    };

    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto& te = mesh.triangle_edges[t];
        int sign[3];
        for (int i = 0; i < 3; ++i) {
            const double d = c.coeffs[tri[i]] - level;
            sign[i] = (d > 0.0) - (d < 0.0);
        }
        std::vector<std::pair<CrossingKey, Vec2>> pts;
        for (int i = 0; i < 3; ++i)
            if (sign[i] == 0)
                pts.push_back({{0, tri[i]}, mesh.vertices[tri[i]]});
        for (int e = 0; e < 3; ++e) {
            const int a = (e + 1) % 3, b = (e + 2) % 3;  // endpoints of local edge e
            if (sign[a] * sign[b] < 0)
                pts.push_back({{1, te[e]}, edge_crossing(te[e])});
        }
        if (pts.size() == 2)
            add_segment(pts[0].first, pts[0].second, pts[1].first, pts[1].second);
        // 0 or 1 points: no crossing; 3 on-vertices: constant triangle, skipped.
    }

    // Chain segments into polylines through shared endpoint keys.
    std::map<CrossingKey, std::vector<int>> incident;
    std::vector<std::array<CrossingKey, 2>> seg_keys;
    std::vector<std::array<Vec2, 2>> seg_pts;
    for (const auto& [k, p] : segments) {
        const int id = static_cast<int>(seg_keys.size());
        seg_keys.push_back({k.first, k.second});
        seg_pts.push_back({p.first, p.second});
        incident[k.first].push_back(id);
        incident[k.second].push_back(id);
    }

    std::vector<char> used(seg_keys.size(), 0);
    std::vector<Polyline> out;
    auto walk = [&](int start, int end_slot) {
        Polyline line;
        int seg = start;
        int slot = end_slot;  // slot of the trailing endpoint
        line.push_back(seg_pts[seg][1 - slot]);
        line.push_back(seg_pts[seg][slot]);
        used[seg] = 1;
        while (true) {
            const CrossingKey key = seg_keys[seg][slot];
            int next = -1;
            for (int cand : incident[key])
                if (!used[cand]) { next = cand; break; }
            if (next < 0) break;
            slot = (seg_keys[next][0] == key) ? 1 : 0;
            line.push_back(seg_pts[next][slot]);
            used[next] = 1;
            seg = next;
        }
        return line;
    };

    // Open chains first (start at degree-1 endpoints), then closed loops.
    for (size_t s = 0; s < seg_keys.size(); ++s) {
        if (used[s]) continue;
        int open_slot = -1;
        for (int slot = 0; slot < 2; ++slot) {
            int free_count = 0;
            for (int cand : incident[seg_keys[s][slot]])
                if (!used[cand]) ++free_count;
            if (free_count == 1) open_slot = 1 - slot;
        }
        if (open_slot >= 0) out.push_back(walk(static_cast<int>(s), open_slot));
    }
    for (size_t s = 0; s < seg_keys.size(); ++s)
        if (!used[s]) out.push_back(walk(static_cast<int>(s), 1));
    return out;
}

// Height of the centroid of the heavy phase, weighted by w(c) = max(0, -c).
// Empty weight (no heavy phase anywhere) reports as undefined.
inline std::optional<double> heavy_phase_centroid_height(const Field& c) {
    const Mesh& mesh = c.space->mesh();
    const QuadratureRule q = quadrature(6);
    double num = 0.0, den = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        const ElementGeometry geo(mesh, t);
        for (int k = 0; k < q.size(); ++k) {
            const double w = std::max(0.0, -eval_p1(c, t, q.points[k]));
            const double wq = q.weights[k] * geo.det * w;
            num += wq * geo.point(q.points[k]).y;
            den += wq;
        }
    }
    if (!(den > 0.0)) return std::nullopt;
    return num / den;
}

// --- per-run diagnostics -----------------------------------------------

struct DiagnosticsRecord {
    double time = 0.0;
    double total_mass = 0.0;
    double energy = 0.0;
    double c_min = 0.0;
    double c_max = 0.0;
    double c_variance = 0.0;
    double theta_min = 0.0;
    double theta_max = 0.0;
    double velocity_l2 = 0.0;
    double divergence_norm = 0.0;
    std::optional<double> centroid_height;
    int newton_iterations = 0;
};

// Caches the mass structures shared by every record of a run.
class DiagnosticsContext {
public:
    DiagnosticsContext(const FeSpace& p1, const FeSpace& velocity)
        : p1_(&p1), vel_(&velocity), mass_p1_(assemble_mass(p1)),
          mass_vel_(assemble_mass(velocity)), area_(p1.mesh().rect.area()) {
        mass_ldlt_.compute(mass_p1_.eigen());
        if (mass_ldlt_.info() != Eigen::Success)
            throw SolverError("DiagnosticsContext: mass factorization failed");
    }

    const SparseMatrix& mass_p1() const { return mass_p1_; }
    double domain_area() const { return area_; }

    double mass(const Field& c) const { return total_mass(c, &mass_p1_); }
    double mean(const Field& c) const { return field_mean(c, mass_p1_, area_); }
    double variance(const Field& c) const { return field_variance(c, mass_p1_, area_); }

    double velocity_l2(const Field& u) const {
        return std::sqrt(std::max(0.0, u.coeffs.dot(mass_vel_.apply(u.coeffs))));
    }

    // L2 norm of the pressure-space projection of div u, relative to the
    // velocity L2 norm: solve M_p pi = B u, return ||pi||_{L2} / max(1,||u||).
    double divergence_l2(const SparseMatrix& divergence, const Field& u) const {
        const Vector bu = divergence.apply(u.coeffs);
        const Vector pi = mass_ldlt_.solve(bu);
        const double norm_pi = std::sqrt(std::max(0.0, pi.dot(bu)));
        return norm_pi / std::max(1.0, velocity_l2(u));
    }

private:
    const FeSpace* p1_;
    const FeSpace* vel_;
    SparseMatrix mass_p1_;
    SparseMatrix mass_vel_;
    double area_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass_ldlt_;
};

}  // namespace chs
