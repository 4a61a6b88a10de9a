#pragma once

#include <vector>

#include "swarmctl/ocp_static.hpp"

namespace swarmctl {

/// One control per time node, n = 0..N, on the grid t_n = n dt.
struct TimeVaryingControl {
    std::vector<ControlField> controls;
    double dt = 0.0;

    static TimeVaryingControl constant(const ControlField& u, std::size_t steps, double dt);

    std::size_t steps() const { return controls.empty() ? 0 : controls.size() - 1; }
    double T() const { return dt * static_cast<double>(steps()); }
    ControlSchedule schedule() const { return ControlSchedule(controls); }
};

/// Trapezoidal sum of alpha/2 ||q_n - q*||_M^2 + beta/2 ||u_n - u*||_{M_u}^2
/// + beta_g/2 ||u_n - u*||_{A_u}^2.
double evaluate_dynamic_cost(const FemOperators& ops, const Trajectory& trajectory, const TimeVaryingControl& control,
                             const StaticSolution& reference, const OcpConfig& config);

struct DynamicGradient {
    std::vector<ControlField> grad;  // per time node
    double J = 0.0;
    Trajectory trajectory;
    DynamicAdjoint adjoint;

    double norm() const;
};

/// Exact gradient of evaluate_dynamic_cost(simulate(q0, control)) with respect
/// to every nodal control coefficient.
DynamicGradient dynamic_gradient(const FemOperators& ops, const DensityField& q0, const TimeVaryingControl& control,
                                 const StaticSolution& reference, const OcpConfig& config);

/// Radially scales every node whose magnitude exceeds `radius`. Returns the
/// number of nodes that were scaled.
std::size_t project_box(TimeVaryingControl& control, double radius);

struct TurnpikeRecord {
    double time = 0.0;
    double u_distance = 0.0;  // sqrt of ||u - u*||_{M_u}^2 summed over components
    double q_distance = 0.0;  // ||q - q*||_M
};

std::vector<TurnpikeRecord> turnpike_metrics(const FemOperators& ops, const Trajectory& trajectory,
                                             const TimeVaryingControl& control, const StaticSolution& reference);

struct DynamicSolution {
    TimeVaryingControl control;
    Trajectory trajectory;
    DynamicAdjoint adjoint;
    std::vector<IterationRecord> history;
    std::vector<TurnpikeRecord> turnpike;
    double box_radius = 0.0;
    std::size_t projected_nodes = 0;  // box violations corrected over all accepted steps
    bool converged = false;
    bool line_search_failed = false;
    std::string message;
};

/// Projected quasi-Newton iteration warm-started from N+1 copies of the
/// static control, with the box |u_n| <= max |u*| enforced after each step.
DynamicSolution solve_dynamic_ocp(const FemOperators& ops, const DensityField& q0, const StaticSolution& reference,
                                  const OcpConfig& config);

/// First time node whose control influences the trajectory: the theta scheme
/// uses u_0 only through the explicit part, so with theta = 1 it is node 1.
std::size_t first_effective_node(double theta);

}  // namespace swarmctl
