#include "swarmctl/state.hpp"

#include <cmath>

#include "swarmctl/error.hpp"

namespace swarmctl {

Equilibrium solve_equilibrium(const FemOperators& ops, const ControlField& u) {
    const auto n = ops.size();
    Equilibrium eq;
    eq.L = state_matrix(ops, u);
    auto lu = std::make_shared<LuSolver>();
    try {
        lu->factorize(bordered(eq.L, ops.F));
    } catch (const SolveError& e) {
        throw SolveError(std::string("bordered equilibrium system is singular (kernel is not one-dimensional): ") +
                         e.what());
    }
    Vector rhs = Vector::Zero(n + 1);
    rhs[n] = 1.0;
    const Vector sol = lu->solve(rhs);
    eq.v = sol.head(n);
    eq.s = sol[n];
    if (std::abs(eq.s) > 1e-8)
        throw SolveError("bordered equilibrium multiplier s = " + std::to_string(eq.s) +
                         " is not zero; the state matrix does not annihilate constants from the left");
    eq.q = normalized_density(eq.v, ops.F);
    const double lnorm = norm_inf(eq.L);
    const double qnorm = eq.q.values.lpNorm<Eigen::Infinity>();
    eq.relative_residual = (eq.L * eq.q.values).lpNorm<Eigen::Infinity>() / std::max(lnorm * qnorm, 1e-300);
    eq.min_value = eq.q.min();
    eq.has_negative = eq.min_value < -1e-12;
    eq.bordered_lu = std::move(lu);
    return eq;
}

ControlSchedule::ControlSchedule(ControlField constant) { nodes_.push_back(std::move(constant)); }

ControlSchedule::ControlSchedule(std::vector<ControlField> per_node) : nodes_(std::move(per_node)) {
    if (nodes_.empty()) throw DimensionError("control schedule is empty");
}

ThetaStepper::ThetaStepper(const FemOperators& ops, ThetaOptions options) : ops_(ops), opt_(options) {
    if (!(opt_.dt > 0.0) || !std::isfinite(opt_.dt)) throw DimensionError("time step must be positive");
    if (!(opt_.theta >= 0.0 && opt_.theta <= 1.0)) throw DimensionError("theta must lie in [0, 1]");
}

SparseMatrix ThetaStepper::mass_over_dt() const {
    if (opt_.lumped) {
        SparseMatrix m = ops_.tensor.pattern;
        for (int k = 0; k < m.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(m, k); it; ++it)
                it.valueRef() = it.row() == it.col() ? ops_.M_lumped[it.row()] / opt_.dt : 0.0;
        return m;
    }
    return ops_.M / opt_.dt;
}

SparseMatrix ThetaStepper::implicit_matrix(const ControlField& u) const {
    return mass_over_dt() + opt_.theta * state_matrix(ops_, u);
}

SparseMatrix ThetaStepper::explicit_matrix(const ControlField& u) const {
    return mass_over_dt() - (1.0 - opt_.theta) * state_matrix(ops_, u);
}

void ThetaStepper::ensure_factored(const ControlField& u) {
    if (have_factor_ && factored_.ux == u.ux && factored_.uy == u.uy) return;
    try {
        lu_.factorize(implicit_matrix(u));
    } catch (const SolveError& e) {
        have_factor_ = false;
        throw SolveError(std::string("implicit theta-step matrix could not be factored (dt too large?): ") + e.what());
    }
    factored_ = u;
    have_factor_ = true;
}

Vector ThetaStepper::step(const Vector& q, const ControlField& u_i, const ControlField& u_ip1) {
    if (q.size() != ops_.size()) throw DimensionError("density size does not match the operators");
    ensure_factored(u_ip1);
    Vector rhs;
    if (opt_.lumped)
        rhs = ops_.M_lumped.cwiseProduct(q) / opt_.dt;
    else
        rhs = ops_.M * q / opt_.dt;
    if (opt_.theta < 1.0) rhs -= (1.0 - opt_.theta) * (state_matrix(ops_, u_i) * q);
    Vector next = lu_.solve(rhs);
    if (!next.allFinite())
        throw SolveError("theta step produced non-finite values; condition estimate " +
                         std::to_string(lu_.condition_estimate()));
    return next;
}

Vector ThetaStepper::solve_implicit_transposed(const ControlField& u, const Vector& b) {
    ensure_factored(u);
    return lu_.solve_transposed(b);
}

DensityField step_theta(const FemOperators& ops, const DensityField& q_i, const ControlField& u_i,
                        const ControlField& u_ip1, const ThetaOptions& options) {
    ThetaStepper stepper(ops, options);
    return DensityField(stepper.step(q_i.values, u_i, u_ip1), ops.F);
}

std::size_t step_count(double T, double dt) {
    if (!(dt > 0.0) || !(T > 0.0)) throw DimensionError("T and dt must be positive");
    const double r = T / dt;
    const double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, r))
        throw DimensionError("T = " + std::to_string(T) + " is not an integer multiple of dt = " + std::to_string(dt));
    return static_cast<std::size_t>(n);
}

Trajectory simulate(const FemOperators& ops, const DensityField& q0, const ControlSchedule& control, double T,
                    const ThetaOptions& options) {
    const auto steps = step_count(T, options.dt);
    if (!control.is_constant() && control.size() != steps + 1)
        throw DimensionError("time-varying control has " + std::to_string(control.size()) + " nodes, grid has " +
                             std::to_string(steps + 1));
    if (q0.values.size() != ops.size()) throw DimensionError("initial density size does not match the operators");

    Trajectory traj;
    traj.options = options;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(q0);
    traj.mass_error.push_back(0.0);
    traj.min_q.push_back(q0.min());

    ThetaStepper stepper(ops, options);
    for (std::size_t n = 0; n < steps; ++n) {
        DensityField next(stepper.step(traj.states.back().values, control.at(n), control.at(n + 1)), ops.F);
        traj.times.push_back(static_cast<double>(n + 1) * options.dt);
        traj.mass_error.push_back(std::abs(next.mass - q0.mass));
        traj.min_q.push_back(next.min());
        traj.states.push_back(std::move(next));
    }
    return traj;
}

std::vector<double> trapezoid_weights(std::size_t steps, double dt) {
    std::vector<double> w(steps + 1, dt);
    w.front() = 0.5 * dt;
    w.back() = 0.5 * dt;
    if (steps == 0) w[0] = 0.0;
    return w;
}

}  // namespace swarmctl
