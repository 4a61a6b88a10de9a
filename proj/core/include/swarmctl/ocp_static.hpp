#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swarmctl/adjoint.hpp"

namespace swarmctl {

struct ArmijoOptions {
    double c1 = 1e-4;
    double shrink = 0.5;
    int max_backtracks = 30;
};

struct OcpConfig {
    double alpha = 1.0;
    double beta = 1e-3;
    double beta_g = 1e-5;
    double tol = 1e-6;          // Euclidean norm of the assembled gradient
    int max_iter = 200;
    int dynamic_max_iter = 50;
    ArmijoOptions armijo;
    // Time discretization, used by the dynamic problem and by simulations.
    double theta = 1.0;
    double dt = 0.03;
    double T = 3.0;
    bool lumped = true;
    double mu = 1.0;

    /// Every violated invariant, empty when valid.
    std::vector<std::string> problems() const;
    /// Throws ConfigError listing all problems.
    void validate() const;
    ThetaOptions theta_options() const { return {dt, theta, lumped}; }
};

/// J = alpha/2 ||q - z||_M^2 + beta/2 ||u||_{M_u}^2 + beta_g/2 ||u||_{A_u}^2 (both components).
double evaluate_cost(const FemOperators& ops, const DensityField& q, const DensityField& z, const ControlField& u,
                     const OcpConfig& config);

/// (beta M_u + beta_g A_u) applied per component.
ControlField apply_regularization(const FemOperators& ops, const ControlField& u, const OcpConfig& config);

struct ReducedGradient {
    ControlField grad;
    double J = 0.0;
    Equilibrium eq;
    AdjointField adjoint;

    double norm() const { return grad.flat().norm(); }
};

ReducedGradient reduced_gradient(const FemOperators& ops, const ControlField& u, const DensityField& z,
                                 const OcpConfig& config);

struct ArmijoResult {
    double tau = 1.0;
    double J = 0.0;
    int backtracks = 0;
};

/// Largest tau in {1, shrink, shrink^2, ...} with J(u + tau d) <= J(u) + c1 tau grad^T d.
/// `J0` is J(u) if already known. Evaluations that throw SolveError count as rejected.
ArmijoResult armijo_backtracking(const std::function<double(const Vector&)>& J, const Vector& u, const Vector& d,
                                 const Vector& grad, const ArmijoOptions& options,
                                 std::optional<double> J0 = std::nullopt);

struct IterationRecord {
    int iteration = 0;
    double J = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;  // step that produced this iterate; 0 for the initial point
};

struct StaticSolution {
    DensityField q_star;
    ControlField u_star;
    AdjointField lambda_q;
    double lambda_m = 0.0;
    std::vector<IterationRecord> history;
    bool converged = false;
    bool line_search_failed = false;
    std::string message;

    double J() const { return history.empty() ? 0.0 : history.back().J; }
    double grad_norm() const { return history.empty() ? 0.0 : history.back().grad_norm; }
};

/// Quasi-Newton iteration with H = beta M_u + beta_g A_u (factored once)
/// and Armijo backtracking. Default initial control is zero.
StaticSolution solve_static_ocp(const FemOperators& ops, const DensityField& z, const OcpConfig& config,
                                std::optional<ControlField> u0 = std::nullopt);

struct TangencyReport {
    double max_normal_component = 0.0;  // max over boundary vertices of |u . n|
    double max_magnitude = 0.0;         // max over all vertices of |u|
    double ratio = 0.0;                 // max_normal_component / max_magnitude
    int worst_vertex = -1;
};

/// Normal component of a control on the boundary, with vertex normals taken
/// as the normalized average of the adjacent boundary edge normals.
TangencyReport tangency_diagnostic(const Mesh& mesh, const ControlField& u);

}  // namespace swarmctl
