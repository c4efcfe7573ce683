#pragma once
// Sparse storage, strong Dirichlet elimination, and direct solves.
// Storage and factorization are delegated to Eigen (CSC + SparseLU); the
// interfaces here are what the rest of the solver codes against.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chs/errors.hpp"

namespace chs {

using Vector = Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

class SparseMatrix {
public:
    SparseMatrix() = default;

    SparseMatrix(int rows, int cols, const std::vector<Triplet>& triplets)
        : mat_(rows, cols) {
        mat_.setFromTriplets(triplets.begin(), triplets.end());
        mat_.makeCompressed();
    }

    explicit SparseMatrix(Eigen::SparseMatrix<double> m) : mat_(std::move(m)) {
        mat_.makeCompressed();
    }

    int rows() const { return static_cast<int>(mat_.rows()); }
    int cols() const { return static_cast<int>(mat_.cols()); }

    Vector apply(const Vector& x) const { return mat_ * x; }

    double frobenius_norm() const { return mat_.norm(); }

    // Max |A - A^T| entry; convenience for the symmetry property tests.
    double asymmetry() const {
        Eigen::SparseMatrix<double> d = mat_ - Eigen::SparseMatrix<double>(mat_.transpose());
        double m = 0.0;
        for (int k = 0; k < d.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
                m = std::max(m, std::abs(it.value()));
        return m;
    }

    const Eigen::SparseMatrix<double>& eigen() const { return mat_; }

private:
    Eigen::SparseMatrix<double> mat_;
};

// Accumulates dof -> value constraints. `add` rejects conflicting duplicates;
// `set` overrides (strongest-condition-wins corner handling is expressed by
// the caller through the order of set calls).
class DirichletConstraints {
public:
    void add(int dof, double value) {
        auto [it, inserted] = values_.try_emplace(dof, value);
        if (!inserted && it->second != value)
            throw ValidationError("conflicting Dirichlet values at dof " + std::to_string(dof));
    }
    void set(int dof, double value) { values_[dof] = value; }

    bool empty() const { return values_.empty(); }
    const std::map<int, double>& map() const { return values_; }

private:
    std::map<int, double> values_;
};

// Replaces constrained rows by identity rows with the prescribed values on
// the right-hand side, and eliminates the matching columns symmetrically
// (their contribution moves to the rhs). The solution of the modified
// system carries the constrained values bit-exactly.
inline void apply_dirichlet(SparseMatrix& A, Vector& b, const DirichletConstraints& bc) {
    if (bc.empty()) return;
    const auto& cmap = bc.map();
    if (!cmap.empty() && (cmap.begin()->first < 0 || cmap.rbegin()->first >= A.rows()))
        throw ValidationError("apply_dirichlet: constrained dof out of range");

    std::vector<char> constrained(A.rows(), 0);
    for (const auto& [dof, val] : cmap) {
        (void)val;
        constrained[dof] = 1;
    }

    const auto& m = A.eigen();
    std::vector<Triplet> kept;
    kept.reserve(m.nonZeros());
    for (int col = 0; col < m.outerSize(); ++col) {
        const bool col_fixed = constrained[col];
        const double g = col_fixed ? cmap.at(col) : 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            if (constrained[row]) continue;  // row replaced below
            if (col_fixed)
                b[row] -= it.value() * g;
            else
                kept.emplace_back(row, col, it.value());
        }
    }
    for (const auto& [dof, val] : cmap) {
        kept.emplace_back(dof, dof, 1.0);
        b[dof] = val;
    }
    A = SparseMatrix(A.rows(), A.cols(), kept);
}

// Direct solver with reusable symbolic analysis: the factorization pattern
// of the time-stepping systems is fixed while their values change, so
// analyzePattern runs once per pattern.
class SparseLuSolver {
public:
    Vector solve(const SparseMatrix& A, const Vector& b) {
        if (A.rows() != A.cols())
            throw SolverError("solve_sparse: matrix is not square");
        if (b.size() != A.rows())
            throw SolverError("solve_sparse: rhs size mismatch");
        if (!analyzed_ || A.eigen().nonZeros() != pattern_nnz_) {
            lu_.analyzePattern(A.eigen());
            pattern_nnz_ = A.eigen().nonZeros();
            analyzed_ = true;
        }
        lu_.factorize(A.eigen());
        if (lu_.info() != Eigen::Success)
            throw SolverError("solve_sparse: factorization failed (" +
                              lu_.lastErrorMessage() + ")");
        Vector x = lu_.solve(b);
        const double residual = (A.eigen() * x - b).norm();
        const double scale = A.frobenius_norm() * x.norm() + b.norm();
        if (!(residual <= 1e-10 * std::max(scale, 1e-300)))
            throw SolverError("solve_sparse: ill-conditioned system, residual " +
                              std::to_string(residual));
        return x;
    }

private:
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
    Eigen::Index pattern_nnz_ = -1;
    bool analyzed_ = false;
};

inline Vector solve_sparse(const SparseMatrix& A, const Vector& b) {
    SparseLuSolver solver;
    return solver.solve(A, b);
}

}  // namespace chs
