#include "swarmctl/ocp_static.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

#include "swarmctl/error.hpp"

namespace swarmctl {

std::vector<std::string> OcpConfig::problems() const {
    std::vector<std::string> p;
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(alpha > 0.0) || !finite(alpha)) p.push_back("alpha must be > 0");
    if (!(beta > 0.0) || !finite(beta)) p.push_back("beta must be > 0");
    if (!(beta_g >= 0.0) || !finite(beta_g)) p.push_back("beta_g must be >= 0");
    if (!(tol > 0.0)) p.push_back("tol must be > 0");
    if (max_iter < 0) p.push_back("max_iter must be >= 0");
    if (dynamic_max_iter < 0) p.push_back("dynamic_max_iter must be >= 0");
    if (!(armijo.c1 > 0.0 && armijo.c1 < 1.0)) p.push_back("armijo.c1 must lie in (0, 1)");
    if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0)) p.push_back("armijo.shrink must lie in (0, 1)");
    if (armijo.max_backtracks < 1) p.push_back("armijo.max_backtracks must be >= 1");
    if (!(theta >= 0.0 && theta <= 1.0)) p.push_back("theta must lie in [0, 1]");
    if (!(dt > 0.0) || !finite(dt)) p.push_back("dt must be > 0");
    if (!(T > 0.0) || !finite(T)) p.push_back("T must be > 0");
    if (dt > 0.0 && T > 0.0) {
        const double r = T / dt;
        if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) p.push_back("T must be an integer multiple of dt");
    }
    if (!(mu > 0.0) || !finite(mu)) p.push_back("mu must be > 0");
    return p;
}

void OcpConfig::validate() const {
    auto p = problems();
    if (!p.empty()) throw ConfigError(std::move(p));
}

ControlField apply_regularization(const FemOperators& ops, const ControlField& u, const OcpConfig& config) {
    return {config.beta * (ops.M_u * u.ux) + config.beta_g * (ops.A_u * u.ux),
            config.beta * (ops.M_u * u.uy) + config.beta_g * (ops.A_u * u.uy)};
}

double evaluate_cost(const FemOperators& ops, const DensityField& q, const DensityField& z, const ControlField& u,
                     const OcpConfig& config) {
    if (q.values.size() != ops.size() || z.values.size() != ops.size() || u.ux.size() != ops.size() ||
        u.uy.size() != ops.size())
        throw DimensionError("cost inputs must match the operator size");
    const Vector e = q.values - z.values;
    return 0.5 * config.alpha * e.dot(ops.M * e) + 0.5 * dot(u, apply_regularization(ops, u, config));
}

ReducedGradient reduced_gradient(const FemOperators& ops, const ControlField& u, const DensityField& z,
                                 const OcpConfig& config) {
    ReducedGradient rg;
    rg.eq = solve_equilibrium(ops, u);
    rg.J = evaluate_cost(ops, rg.eq.q, z, u, config);
    rg.adjoint = solve_adjoint_static(ops, rg.eq, z, config.alpha);
    rg.grad = apply_regularization(ops, u, config) + gradient_contraction(ops.tensor, rg.adjoint.values, rg.eq.q.values);
    return rg;
}

ArmijoResult armijo_backtracking(const std::function<double(const Vector&)>& J, const Vector& u, const Vector& d,
                                 const Vector& grad, const ArmijoOptions& options, std::optional<double> J0) {
    const double slope = grad.dot(d);
    if (!(slope < 0.0)) throw LineSearchError("direction is not a descent direction (grad^T d >= 0)");
    const double f0 = J0 ? *J0 : J(u);
    ArmijoResult res;
    double tau = 1.0;
    for (int k = 0; k <= options.max_backtracks; ++k) {
        double f = std::numeric_limits<double>::infinity();
        try {
            f = J(u + tau * d);
        } catch (const SolveError&) {
        }
        if (std::isfinite(f) && f <= f0 + options.c1 * tau * slope) {
            res.tau = tau;
            res.J = f;
            res.backtracks = k;
            return res;
        }
        tau *= options.shrink;
    }
    throw LineSearchError("Armijo condition not met after " + std::to_string(options.max_backtracks) +
                          " backtracks");
}

StaticSolution solve_static_ocp(const FemOperators& ops, const DensityField& z, const OcpConfig& config,
                                std::optional<ControlField> u0) {
    config.validate();
    if (z.values.size() != ops.size()) throw DimensionError("target density size does not match the operators");
    const auto n = ops.size();
    ControlField u = u0 ? *u0 : ControlField::zeros(n);
    if (u.ux.size() != n || u.uy.size() != n) throw DimensionError("initial control size does not match the operators");

    const SparseMatrix H = config.beta * ops.M_u + config.beta_g * ops.A_u;
    Eigen::SimplicialLDLT<SparseMatrix> hsolve(H);
    if (hsolve.info() != Eigen::Success) throw SolveError("quasi-Newton matrix is not positive definite");

    auto cost_of = [&](const Vector& flat) {
        const auto c = ControlField::from_flat(flat);
        return evaluate_cost(ops, solve_equilibrium(ops, c).q, z, c, config);
    };

    StaticSolution sol;
    double step = 0.0;
    for (int it = 0;; ++it) {
        ReducedGradient rg = reduced_gradient(ops, u, z, config);
        if (!std::isfinite(rg.J)) throw SolveError("cost is not finite at iteration " + std::to_string(it));
        const double gnorm = rg.norm();
        sol.history.push_back({it, rg.J, gnorm, step});
        sol.q_star = rg.eq.q;
        sol.u_star = u;
        sol.lambda_q = rg.adjoint;
        sol.lambda_m = rg.adjoint.lambda_m;
        if (gnorm < config.tol) {
            sol.converged = true;
            sol.message = "converged";
            break;
        }
        if (it >= config.max_iter) {
            sol.message = "max_iter reached";
            break;
        }
        ControlField d{-hsolve.solve(rg.grad.ux), -hsolve.solve(rg.grad.uy)};
        try {
            const auto ls = armijo_backtracking(cost_of, u.flat(), d.flat(), rg.grad.flat(), config.armijo, rg.J);
            u += ls.tau * d;
            step = ls.tau;
        } catch (const LineSearchError& e) {
            sol.line_search_failed = true;
            sol.message = std::string("line search failed: ") + e.what();
            break;
        }
    }
    return sol;
}

TangencyReport tangency_diagnostic(const Mesh& mesh, const ControlField& u) {
    const auto nv = mesh.num_vertices();
    if (static_cast<std::size_t>(u.ux.size()) != nv) throw DimensionError("control size does not match the mesh");
    std::vector<std::array<double, 2>> normal(nv, {0.0, 0.0});
    const auto& V = mesh.vertices();
    for (const auto& be : mesh.boundary_edges()) {
        // Boundary edges run with the domain on their left, so this normal points outward.
        const auto& a = V[be.v[0]];
        const auto& b = V[be.v[1]];
        double nx = b.y - a.y, ny = -(b.x - a.x);
        const double len = std::hypot(nx, ny);
        nx /= len;
        ny /= len;
        for (int vtx : be.v) {
            normal[vtx][0] += nx;
            normal[vtx][1] += ny;
        }
    }
    TangencyReport rep;
    rep.max_magnitude = u.max_magnitude();
    for (std::size_t i = 0; i < nv; ++i) {
        if (!mesh.boundary_vertex()[i]) continue;
        const double len = std::hypot(normal[i][0], normal[i][1]);
        if (len == 0.0) continue;
        const auto k = static_cast<Eigen::Index>(i);
        const double un = std::abs(u.ux[k] * normal[i][0] + u.uy[k] * normal[i][1]) / len;
        if (un > rep.max_normal_component || rep.worst_vertex < 0) {
            rep.max_normal_component = un;
            rep.worst_vertex = static_cast<int>(i);
        }
    }
    rep.ratio = rep.max_magnitude > 0.0 ? rep.max_normal_component / rep.max_magnitude : 0.0;
    return rep;
}

}  // namespace swarmctl
