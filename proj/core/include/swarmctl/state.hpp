#pragma once

#include <memory>
#include <vector>

#include "swarmctl/fem.hpp"
#include "swarmctl/linalg.hpp"

namespace swarmctl {

struct Equilibrium {
    DensityField q;                 // unit mass
    Vector v;                       // kernel vector as returned by the bordered solve
    double s = 0.0;                 // auxiliary unknown of the bordered system, ~0
    double relative_residual = 0.0; // ||L q|| / (||L|| ||q||), infinity norms
    double min_value = 0.0;
    bool has_negative = false;      // min_value < -1e-12; diagnostic only

    // Kept so the static adjoint can reuse the factorization of [L F; F^T 0].
    SparseMatrix L;
    std::shared_ptr<const LuSolver> bordered_lu;
};

/// Unit-mass kernel element of L(u) from [L F; F^T 0][q; s] = [0; 1].
Equilibrium solve_equilibrium(const FemOperators& ops, const ControlField& u);

struct ThetaOptions {
    double dt = 0.03;
    double theta = 1.0;
    bool lumped = true;
};

/// Piecewise-constant-in-memory control over the time grid: either one
/// control for every node or one control per node.
class ControlSchedule {
public:
    ControlSchedule(ControlField constant);
    ControlSchedule(std::vector<ControlField> per_node);

    bool is_constant() const { return nodes_.size() == 1; }
    std::size_t size() const { return nodes_.size(); }
    const ControlField& at(std::size_t n) const { return nodes_[is_constant() ? 0 : n]; }

private:
    std::vector<ControlField> nodes_;
};

/// Advances the theta scheme
///   (Mm/dt + theta L(u_{i+1})) q_{i+1} = (Mm/dt - (1-theta) L(u_i)) q_i
/// with Mm the lumped or consistent mass. The implicit matrix is refactored
/// only when u_{i+1} changes.
class ThetaStepper {
public:
    ThetaStepper(const FemOperators& ops, ThetaOptions options);

    Vector step(const Vector& q, const ControlField& u_i, const ControlField& u_ip1);

    /// Implicit (E) and explicit (G) matrices for a given control.
    SparseMatrix implicit_matrix(const ControlField& u) const;
    SparseMatrix explicit_matrix(const ControlField& u) const;

    /// 1-norm condition estimate of the most recently factored implicit matrix.
    double condition_estimate() const { return lu_.condition_estimate(); }
    const ThetaOptions& options() const { return opt_; }

    /// Solves E(u)^T x = b with E(u) the implicit matrix (refactors if needed).
    Vector solve_implicit_transposed(const ControlField& u, const Vector& b);

private:
    void ensure_factored(const ControlField& u);
    SparseMatrix mass_over_dt() const;

    const FemOperators& ops_;
    ThetaOptions opt_;
    LuSolver lu_;
    ControlField factored_;
    bool have_factor_ = false;
};

DensityField step_theta(const FemOperators& ops, const DensityField& q_i, const ControlField& u_i,
                        const ControlField& u_ip1, const ThetaOptions& options);

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityField> states;
    std::vector<double> mass_error;  // |F^T q_n - F^T q_0|
    std::vector<double> min_q;
    ThetaOptions options;

    std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
};

/// Number of steps N with N * dt == T (to 1e-9 relative); DimensionError otherwise.
std::size_t step_count(double T, double dt);

Trajectory simulate(const FemOperators& ops, const DensityField& q0, const ControlSchedule& control, double T,
                    const ThetaOptions& options);

/// Trapezoidal weights over N+1 uniform nodes.
std::vector<double> trapezoid_weights(std::size_t steps, double dt);

}  // namespace swarmctl
