#pragma once

#include <vector>

#include "swarmctl/state.hpp"

namespace swarmctl {

struct AdjointField {
    Vector values;              // zero mean: F^T values = 0
    double lambda_m = 0.0;      // mass-constraint multiplier (static only)
    double nu = 0.0;            // multiplier of the zero-mean border row
    double relative_residual = 0.0;
};

/// lambda_m = -alpha v^T M (q - z) / (v^T F), making the adjoint right-hand
/// side orthogonal to the kernel vector v.
double compute_lambda_m(const Vector& v, const FemOperators& ops, const Vector& q, const Vector& z, double alpha);

/// Solves [L^T F; F^T 0][lambda; nu] = [alpha M (q - z) + lambda_m F; 0].
AdjointField solve_adjoint_static(const FemOperators& ops, const ControlField& u, const DensityField& q,
                                  const DensityField& z, double alpha);

/// Same, reusing the factorization held by `eq` (q = eq.q).
AdjointField solve_adjoint_static(const FemOperators& ops, const Equilibrium& eq, const DensityField& z, double alpha);

struct DynamicAdjoint {
    /// Lagrange multipliers p_n of the step constraints E_n q_n = G_{n-1} q_{n-1},
    /// n = 1..N; p[0] is unused and zero. These feed the reduced gradient.
    std::vector<Vector> multipliers;
    /// Per-node adjoint density on the state grid: lambda[n] = p_{n+1} / dt with
    /// the mean removed, lambda[N] = 0.
    std::vector<Vector> lambda;
};

/// Exact discrete adjoint of the theta scheme for the tracking cost
/// sum_n w_n (alpha/2) ||q_n - q_ref||_M^2 with trapezoidal weights w_n.
DynamicAdjoint solve_adjoint_dynamic(const FemOperators& ops, const Trajectory& trajectory,
                                     const ControlSchedule& control, const DensityField& q_ref, double alpha);

/// Removes the F-weighted mean: x - (F^T x / F^T 1) 1.
Vector zero_mean(const Vector& x, const Vector& F);

}  // namespace swarmctl
