#include "swarmctl/ocp_dynamic.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "swarmctl/error.hpp"

namespace swarmctl {

TimeVaryingControl TimeVaryingControl::constant(const ControlField& u, std::size_t steps, double dt) {
    return {std::vector<ControlField>(steps + 1, u), dt};
}

namespace {

void check_grid(const Trajectory& trajectory, const TimeVaryingControl& control) {
    if (trajectory.states.size() != control.controls.size())
        throw DimensionError("trajectory has " + std::to_string(trajectory.states.size()) + " nodes, control has " +
                             std::to_string(control.controls.size()));
    if (std::abs(trajectory.options.dt - control.dt) > 1e-12 * control.dt)
        throw DimensionError("trajectory and control use different time steps");
}

double m_norm2(const SparseMatrix& M, const Vector& e) { return e.dot(M * e); }

}  // namespace

double evaluate_dynamic_cost(const FemOperators& ops, const Trajectory& trajectory, const TimeVaryingControl& control,
                             const StaticSolution& reference, const OcpConfig& config) {
    check_grid(trajectory, control);
    const auto w = trapezoid_weights(control.steps(), control.dt);
    double J = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
        const Vector e = trajectory.states[n].values - reference.q_star.values;
        const ControlField du = control.controls[n] - reference.u_star;
        J += w[n] * (0.5 * config.alpha * m_norm2(ops.M, e) + 0.5 * dot(du, apply_regularization(ops, du, config)));
    }
    return J;
}

double DynamicGradient::norm() const {
    double s = 0.0;
    for (const auto& g : grad) s += dot(g, g);
    return std::sqrt(s);
}

DynamicGradient dynamic_gradient(const FemOperators& ops, const DensityField& q0, const TimeVaryingControl& control,
                                 const StaticSolution& reference, const OcpConfig& config) {
    const std::size_t N = control.steps();
    ThetaOptions opt = config.theta_options();
    opt.dt = control.dt;
    DynamicGradient out;
    const auto schedule = control.schedule();
    out.trajectory = simulate(ops, q0, schedule, control.T(), opt);
    out.J = evaluate_dynamic_cost(ops, out.trajectory, control, reference, config);
    out.adjoint = solve_adjoint_dynamic(ops, out.trajectory, schedule, reference.q_star, config.alpha);

    const auto w = trapezoid_weights(N, control.dt);
    const auto& p = out.adjoint.multipliers;
    out.grad.resize(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        const Vector& qn = out.trajectory.states[n].values;
        ControlField g = w[n] * apply_regularization(ops, control.controls[n] - reference.u_star, config);
        if (n >= 1 && opt.theta != 0.0) g += opt.theta * gradient_contraction(ops.tensor, p[n], qn);
        if (n + 1 <= N && opt.theta != 1.0) g += (1.0 - opt.theta) * gradient_contraction(ops.tensor, p[n + 1], qn);
        out.grad[n] = std::move(g);
    }
    return out;
}

std::size_t project_box(TimeVaryingControl& control, double radius) {
    std::size_t count = 0;
    for (auto& u : control.controls)
        for (Eigen::Index i = 0; i < u.ux.size(); ++i) {
            const double m = std::hypot(u.ux[i], u.uy[i]);
            if (m > radius) {
                const double s = radius / m;
                u.ux[i] *= s;
                u.uy[i] *= s;
                ++count;
            }
        }
    return count;
}

std::vector<TurnpikeRecord> turnpike_metrics(const FemOperators& ops, const Trajectory& trajectory,
                                             const TimeVaryingControl& control, const StaticSolution& reference) {
    check_grid(trajectory, control);
    std::vector<TurnpikeRecord> out;
    for (std::size_t n = 0; n < control.controls.size(); ++n) {
        const ControlField du = control.controls[n] - reference.u_star;
        const Vector e = trajectory.states[n].values - reference.q_star.values;
        out.push_back({trajectory.times[n],
                       std::sqrt(m_norm2(ops.M_u, du.ux) + m_norm2(ops.M_u, du.uy)),
                       std::sqrt(m_norm2(ops.M, e))});
    }
    return out;
}

std::size_t first_effective_node(double theta) { return theta == 1.0 ? 1 : 0; }

namespace {

// Gradient with the outward radial part removed at nodes on the box boundary.
double projected_norm(const std::vector<ControlField>& grad, const TimeVaryingControl& control, double radius) {
    double s = 0.0;
    for (std::size_t n = 0; n < grad.size(); ++n) {
        const auto& g = grad[n];
        const auto& u = control.controls[n];
        for (Eigen::Index i = 0; i < g.ux.size(); ++i) {
            double gx = g.ux[i], gy = g.uy[i];
            const double m = std::hypot(u.ux[i], u.uy[i]);
            if (m >= radius * (1.0 - 1e-12) && m > 0.0) {
                const double ex = u.ux[i] / m, ey = u.uy[i] / m;
                const double radial = gx * ex + gy * ey;
                if (radial < 0.0) {
                    gx -= radial * ex;
                    gy -= radial * ey;
                }
            }
            s += gx * gx + gy * gy;
        }
    }
    return std::sqrt(s);
}

}  // namespace

DynamicSolution solve_dynamic_ocp(const FemOperators& ops, const DensityField& q0, const StaticSolution& reference,
                                  const OcpConfig& config) {
    config.validate();
    if (q0.values.size() != ops.size()) throw DimensionError("initial density size does not match the operators");
    if (reference.u_star.ux.size() != ops.size()) throw DimensionError("static solution does not match the operators");
    const std::size_t N = step_count(config.T, config.dt);

    const SparseMatrix H = config.beta * ops.M_u + config.beta_g * ops.A_u;
    Eigen::SimplicialLDLT<SparseMatrix> hsolve(H);
    if (hsolve.info() != Eigen::Success) throw SolveError("quasi-Newton matrix is not positive definite");
    const auto w = trapezoid_weights(N, config.dt);

    DynamicSolution sol;
    sol.box_radius = reference.u_star.max_magnitude();
    sol.control = TimeVaryingControl::constant(reference.u_star, N, config.dt);

    auto cost_of = [&](const TimeVaryingControl& c) {
        ThetaOptions opt = config.theta_options();
        const auto traj = simulate(ops, q0, c.schedule(), c.T(), opt);
        return evaluate_dynamic_cost(ops, traj, c, reference, config);
    };

    double step = 0.0;
    for (int it = 0;; ++it) {
        DynamicGradient dg = dynamic_gradient(ops, q0, sol.control, reference, config);
        if (!std::isfinite(dg.J)) throw SolveError("dynamic cost is not finite at iteration " + std::to_string(it));
        const double gnorm = projected_norm(dg.grad, sol.control, sol.box_radius);
        sol.history.push_back({it, dg.J, gnorm, step});
        sol.trajectory = std::move(dg.trajectory);
        sol.adjoint = std::move(dg.adjoint);
        if (gnorm < config.tol) {
            sol.converged = true;
            sol.message = "converged";
            break;
        }
        if (it >= config.dynamic_max_iter) {
            sol.message = "max_iter reached";
            break;
        }

        // Per-node quasi-Newton direction; node n carries quadrature weight w_n.
        std::vector<ControlField> d(N + 1);
        for (std::size_t n = 0; n <= N; ++n) {
            if (w[n] == 0.0) {
                d[n] = ControlField::zeros(ops.size());
                continue;
            }
            d[n] = {-hsolve.solve(dg.grad[n].ux) / w[n], -hsolve.solve(dg.grad[n].uy) / w[n]};
        }

        // Projected Armijo: trial = P(u + tau d), sufficient decrease measured
        // along the actual (projected) displacement. The first trial restarts
        // one expansion above the previously accepted step.
        bool accepted = false;
        double tau = step > 0.0 ? std::min(1.0, step / config.armijo.shrink) : 1.0;
        for (int k = 0; k <= config.armijo.max_backtracks; ++k, tau *= config.armijo.shrink) {
            TimeVaryingControl trial = sol.control;
            for (std::size_t n = 0; n <= N; ++n) trial.controls[n] += tau * d[n];
            const std::size_t projected = project_box(trial, sol.box_radius);
            double slope = 0.0;
            for (std::size_t n = 0; n <= N; ++n) slope += dot(dg.grad[n], trial.controls[n] - sol.control.controls[n]);
            if (!(slope < 0.0)) continue;
            double f = std::numeric_limits<double>::infinity();
            try {
                f = cost_of(trial);
            } catch (const SolveError&) {
            }
            if (std::isfinite(f) && f <= dg.J + config.armijo.c1 * slope) {
                sol.control = std::move(trial);
                sol.projected_nodes += projected;
                step = tau;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            sol.line_search_failed = true;
            sol.message = "line search failed after " + std::to_string(config.armijo.max_backtracks) + " backtracks";
            break;
        }
    }
    sol.turnpike = turnpike_metrics(ops, sol.trajectory, sol.control, reference);
    return sol;
}

}  // namespace swarmctl
