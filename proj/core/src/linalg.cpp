#include "swarmctl/linalg.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseLU>

#include "swarmctl/error.hpp"

namespace swarmctl {

struct LuSolver::Impl {
    SparseMatrix a;
    mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;  // transpose() is non-const
    bool analyzed = false;
};

LuSolver::LuSolver() : impl_(std::make_unique<Impl>()) {}
LuSolver::LuSolver(const SparseMatrix& a) : LuSolver() { factorize(a); }
LuSolver::LuSolver(LuSolver&&) noexcept = default;
LuSolver& LuSolver::operator=(LuSolver&&) noexcept = default;
LuSolver::~LuSolver() = default;

void LuSolver::factorize(const SparseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("LU needs a square matrix");
    const bool same_pattern = impl_->analyzed && impl_->a.rows() == a.rows() && impl_->a.nonZeros() == a.nonZeros() &&
                              std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1,
                                         impl_->a.outerIndexPtr()) &&
                              std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), impl_->a.innerIndexPtr());
    impl_->a = a;
    impl_->a.makeCompressed();
    if (!same_pattern) {
        impl_->lu.analyzePattern(impl_->a);
        impl_->analyzed = true;
    }
    impl_->lu.factorize(impl_->a);
    if (impl_->lu.info() != Eigen::Success)
        throw SolveError("sparse LU failed: " + impl_->lu.lastErrorMessage());
}

Eigen::Index LuSolver::rows() const { return impl_->a.rows(); }

Vector LuSolver::solve(const Vector& b) const {
    if (b.size() != impl_->a.rows()) throw DimensionError("right-hand side size does not match the matrix");
    Vector x = impl_->lu.solve(b);
    Vector r = b - impl_->a * x;
    x += impl_->lu.solve(r);
    if (!x.allFinite()) throw SolveError("sparse LU produced non-finite values (singular matrix)");
    return x;
}

Vector LuSolver::solve_transposed(const Vector& b) const {
    if (b.size() != impl_->a.rows()) throw DimensionError("right-hand side size does not match the matrix");
    Vector x = impl_->lu.transpose().solve(b);
    Vector r = b - impl_->a.transpose() * x;
    x += impl_->lu.transpose().solve(r);
    if (!x.allFinite()) throw SolveError("sparse LU produced non-finite values (singular matrix)");
    return x;
}

double LuSolver::condition_estimate() const {
    const auto& a = impl_->a;
    const auto n = a.rows();
    double anorm = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
        anorm = std::max(anorm, col);
    }
    // Hager's method for ||A^{-1}||_1.
    Vector x = Vector::Constant(n, 1.0 / static_cast<double>(n));
    double est = 0.0;
    Eigen::Index last = -1;
    for (int iter = 0; iter < 5; ++iter) {
        Vector y = impl_->lu.solve(x);
        const double ny = y.lpNorm<1>();
        if (iter > 0 && ny <= est) break;
        est = ny;
        Vector xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
        Vector z = impl_->lu.transpose().solve(xi);
        Eigen::Index j;
        const double zmax = z.cwiseAbs().maxCoeff(&j);
        if (zmax <= z.dot(x) || j == last) break;
        last = j;
        x.setZero();
        x[j] = 1.0;
    }
    return anorm * est;
}

SparseMatrix bordered(const SparseMatrix& a, const Vector& F) {
    const auto n = a.rows();
    if (a.cols() != n || F.size() != n) throw DimensionError("bordered system needs square a and matching F");
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * n));
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index i = 0; i < n; ++i) {
        t.emplace_back(i, n, F[i]);
        t.emplace_back(n, i, F[i]);
    }
    SparseMatrix b(n + 1, n + 1);
    b.setFromTriplets(t.begin(), t.end());
    b.makeCompressed();
    return b;
}

double norm_inf(const SparseMatrix& a) {
    Vector rows = Vector::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) rows[it.row()] += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

}  // namespace swarmctl
