#pragma once

#include <memory>

#include "swarmctl/fields.hpp"

namespace swarmctl {

/// Sparse LU with one step of iterative refinement on every solve. Also
/// solves with the transpose, reusing the same factorization.
class LuSolver {
public:
    LuSolver();
    explicit LuSolver(const SparseMatrix& a);
    LuSolver(LuSolver&&) noexcept;
    LuSolver& operator=(LuSolver&&) noexcept;
    ~LuSolver();

    /// Refactors; keeps the symbolic analysis when the pattern is unchanged.
    void factorize(const SparseMatrix& a);

    Vector solve(const Vector& b) const;
    Vector solve_transposed(const Vector& b) const;

    /// Hager-Higham estimate of the 1-norm condition number.
    double condition_estimate() const;

    Eigen::Index rows() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// [[a, F], [F^T, 0]] of size (n+1) x (n+1).
SparseMatrix bordered(const SparseMatrix& a, const Vector& F);

double norm_inf(const SparseMatrix& a);

}  // namespace swarmctl
