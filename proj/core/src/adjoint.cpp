#include "swarmctl/adjoint.hpp"

#include <cmath>

#include "swarmctl/error.hpp"

namespace swarmctl {

double compute_lambda_m(const Vector& v, const FemOperators& ops, const Vector& q, const Vector& z, double alpha) {
    if (v.size() != ops.size() || q.size() != ops.size() || z.size() != ops.size())
        throw DimensionError("lambda_m inputs must match the operator size");
    const double vf = v.dot(ops.F);
    if (std::abs(vf) <= 1e-14 * v.lpNorm<1>() * ops.F.lpNorm<Eigen::Infinity>() || vf == 0.0)
        throw SolveError("kernel vector is orthogonal to the mass vector (corrupted kernel)");
    return -alpha * v.dot(ops.M * (q - z)) / vf;
}

namespace {

AdjointField solve_with(const FemOperators& ops, const SparseMatrix& L, const LuSolver& bordered_lu, const Vector& v,
                        const DensityField& q, const DensityField& z, double alpha) {
    const auto n = ops.size();
    if (z.values.size() != n) throw DimensionError("target density size does not match the operators");
    AdjointField out;
    out.lambda_m = compute_lambda_m(v, ops, q.values, z.values, alpha);
    Vector rhs = Vector::Zero(n + 1);
    rhs.head(n) = alpha * (ops.M * (q.values - z.values)) + out.lambda_m * ops.F;
    // [L F; F^T 0] is transposed to [L^T F; F^T 0] since the border is symmetric.
    const Vector sol = bordered_lu.solve_transposed(rhs);
    out.values = sol.head(n);
    out.nu = sol[n];
    const Vector r = L.transpose() * out.values - rhs.head(n);
    const double scale = rhs.head(n).lpNorm<Eigen::Infinity>();
    out.relative_residual = scale > 0.0 ? r.lpNorm<Eigen::Infinity>() / scale : r.lpNorm<Eigen::Infinity>();
    if (scale > 0.0 && out.relative_residual > 1e-8)
        throw SolveError("adjoint residual " + std::to_string(out.relative_residual) +
                         " too large; the right-hand side is not compatible with the kernel (stale q?)");
    return out;
}

}  // namespace

AdjointField solve_adjoint_static(const FemOperators& ops, const ControlField& u, const DensityField& q,
                                  const DensityField& z, double alpha) {
    if (q.values.size() != ops.size()) throw DimensionError("density size does not match the operators");
    const SparseMatrix L = state_matrix(ops, u);
    LuSolver lu;
    try {
        lu.factorize(bordered(L, ops.F));
    } catch (const SolveError& e) {
        throw SolveError(std::string("bordered adjoint system is singular: ") + e.what());
    }
    return solve_with(ops, L, lu, q.values, q, z, alpha);
}

AdjointField solve_adjoint_static(const FemOperators& ops, const Equilibrium& eq, const DensityField& z, double alpha) {
    return solve_with(ops, eq.L, *eq.bordered_lu, eq.v, eq.q, z, alpha);
}

Vector zero_mean(const Vector& x, const Vector& F) {
    return x - Vector::Constant(x.size(), F.dot(x) / F.sum());
}

DynamicAdjoint solve_adjoint_dynamic(const FemOperators& ops, const Trajectory& trajectory,
                                     const ControlSchedule& control, const DensityField& q_ref, double alpha) {
    const std::size_t N = trajectory.steps();
    const auto& opt = trajectory.options;
    if (trajectory.states.size() != N + 1 || trajectory.times.size() != N + 1)
        throw DimensionError("trajectory is inconsistent");
    if (!control.is_constant() && control.size() != N + 1)
        throw DimensionError("control has " + std::to_string(control.size()) + " nodes, trajectory has " +
                             std::to_string(N + 1));
    if (q_ref.values.size() != ops.size()) throw DimensionError("reference density size does not match the operators");
    for (std::size_t n = 1; n <= N; ++n)
        if (std::abs(trajectory.times[n] - trajectory.times[n - 1] - opt.dt) > 1e-9 * opt.dt)
            throw DimensionError("trajectory time grid does not match dt");

    const auto w = trapezoid_weights(N, opt.dt);
    const auto n_q = ops.size();
    DynamicAdjoint out;
    out.multipliers.assign(N + 1, Vector::Zero(n_q));
    out.lambda.assign(N + 1, Vector::Zero(n_q));

    ThetaStepper stepper(ops, opt);
    // E_n^T p_n = w_n alpha M (q_n - q_ref) + G_n^T p_{n+1}, p_{N+1} = 0.
    for (std::size_t n = N; n >= 1; --n) {
        Vector rhs = w[n] * alpha * (ops.M * (trajectory.states[n].values - q_ref.values));
        if (n < N) rhs += stepper.explicit_matrix(control.at(n)).transpose() * out.multipliers[n + 1];
        out.multipliers[n] = stepper.solve_implicit_transposed(control.at(n), rhs);
    }
    for (std::size_t n = 0; n < N; ++n) out.lambda[n] = zero_mean(out.multipliers[n + 1] / opt.dt, ops.F);
    return out;
}

}  // namespace swarmctl
