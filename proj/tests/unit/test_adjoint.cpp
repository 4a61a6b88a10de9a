#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"
#include "swarmctl/ocp_dynamic.hpp"
#include "swarmctl/presets.hpp"

using namespace swarmctl;
namespace st = swarmctl::testing;

namespace {

Mesh mesh_with_hole(double h) {
    const Hole hole = Circle{{0.2, 0.1}, 0.3};
    return generate_rect_mesh({-1, -1, 1, 1}, h, std::span<const Hole>(&hole, 1));
}

Vector unit_direction(Eigen::Index n, std::mt19937_64& rng) {
    const Vector d = st::random_vector(n, rng);
    return d / d.norm();
}

Vector flatten(const TimeVaryingControl& c) {
    const Eigen::Index block = 2 * c.controls.front().nodes();
    Vector out(block * static_cast<Eigen::Index>(c.controls.size()));
    for (std::size_t n = 0; n < c.controls.size(); ++n)
        out.segment(static_cast<Eigen::Index>(n) * block, block) = c.controls[n].flat();
    return out;
}

TimeVaryingControl unflatten(const Vector& x, std::size_t nodes, double dt) {
    const Eigen::Index block = x.size() / static_cast<Eigen::Index>(nodes);
    TimeVaryingControl c;
    c.dt = dt;
    for (std::size_t n = 0; n < nodes; ++n)
        c.controls.push_back(ControlField::from_flat(x.segment(static_cast<Eigen::Index>(n) * block, block)));
    return c;
}

void check_static_gradient(const FemOperators& ops, const DensityField& z, std::uint64_t seed) {
    OcpConfig cfg;
    std::mt19937_64 rng(seed);
    const ControlField u = st::random_control(ops.size(), rng, 0.8);
    const auto rg = reduced_gradient(ops, u, z, cfg);
    auto J = [&](const Vector& x) {
        const auto c = ControlField::from_flat(x);
        return evaluate_cost(ops, solve_equilibrium(ops, c).q, z, c, cfg);
    };
    EXPECT_NEAR(J(u.flat()), rg.J, 1e-14);
    for (int k = 0; k < 10; ++k) {
        const Vector d = unit_direction(2 * ops.size(), rng);
        EXPECT_LT(st::directional_fd_error(J, u.flat(), d, rg.grad.flat().dot(d)), 1e-5) << "direction " << k;
    }
}

}  // namespace

TEST(StaticAdjoint, ReducedGradientMatchesFiniteDifferences) {
    const Mesh mesh = mesh_with_hole(0.2);
    ASSERT_LE(mesh.num_vertices(), 300u);
    const auto ops = assemble_operators(mesh, 1.0);
    check_static_gradient(ops, normalized_density(nodal_gaussian(mesh, {0.5, 0.5}, 0.3), ops.F), 1);
}

TEST(StaticAdjoint, ReducedGradientWithDriftMatchesFiniteDifferences) {
    const Mesh mesh = mesh_with_hole(0.2);
    const auto ops = assemble_operators(mesh, 1.0, drift_field(DriftKind::Cellular));
    check_static_gradient(ops, normalized_density(nodal_indicator(mesh, {Rect{-0.9, -0.9, -0.3, 0.0}}), ops.F), 2);
}

TEST(StaticAdjoint, MultiplierMakesRightHandSideCompatible) {
    const Mesh mesh = mesh_with_hole(0.25);
    const auto ops = assemble_operators(mesh, 1.0);
    std::mt19937_64 rng(3);
    const ControlField u = st::random_control(ops.size(), rng, 1.0);
    const auto z = normalized_density(nodal_gaussian(mesh, {-0.5, 0.5}, 0.3), ops.F);
    const auto eq = solve_equilibrium(ops, u);
    const double alpha = 2.0;
    const auto adj = solve_adjoint_static(ops, eq, z, alpha);
    const Vector rhs = alpha * (ops.M * (eq.q.values - z.values)) + adj.lambda_m * ops.F;
    EXPECT_LT(std::abs(eq.q.values.dot(rhs)), 1e-14 * eq.q.values.norm() * rhs.norm() * 10);
    EXPECT_LT(std::abs(ops.F.dot(adj.values)), 1e-13 * adj.values.norm());
    EXPECT_LT(adj.relative_residual, 1e-10);

    // Dense oracle: L^T lambda = rhs with F^T lambda = 0.
    const Eigen::MatrixXd L = st::dense_stiffness(mesh) - st::dense_advection(mesh, u);
    Eigen::MatrixXd K(L.rows() + 1, L.cols() + 1);
    K.setZero();
    K.topLeftCorner(L.rows(), L.cols()) = L.transpose();
    K.topRightCorner(L.rows(), 1) = ops.F;
    K.bottomLeftCorner(1, L.cols()) = ops.F.transpose();
    Vector b = Vector::Zero(L.rows() + 1);
    b.head(L.rows()) = rhs;
    const Vector oracle = K.fullPivLu().solve(b).head(L.rows());
    EXPECT_LT((adj.values - oracle).norm() / oracle.norm(), 1e-9);

    // The convenience overload refactors and must agree.
    const auto again = solve_adjoint_static(ops, u, eq.q, z, alpha);
    EXPECT_LT((again.values - adj.values).norm() / adj.values.norm(), 1e-10);
}

TEST(StaticAdjoint, GradientAtZeroControlIsPureContraction) {
    const Mesh mesh = mesh_with_hole(0.3);
    const auto ops = assemble_operators(mesh, 1.0);
    OcpConfig cfg;
    cfg.beta_g = 0.0;
    const auto z = normalized_density(nodal_gaussian(mesh, {0.6, -0.6}, 0.25), ops.F);
    const auto rg = reduced_gradient(ops, ControlField::zeros(ops.size()), z, cfg);
    const Vector& lambda = rg.adjoint.values;
    const Vector& q = rg.eq.q.values;
    for (Eigen::Index k = 0; k < ops.size(); ++k) {
        ControlField ex = ControlField::zeros(ops.size()), ey = ex;
        ex.ux[k] = 1.0;
        ey.uy[k] = 1.0;
        EXPECT_NEAR(rg.grad.ux[k], lambda.dot(st::dense_advection(mesh, ex) * q), 1e-14);
        EXPECT_NEAR(rg.grad.uy[k], lambda.dot(st::dense_advection(mesh, ey) * q), 1e-14);
    }
}

TEST(StaticAdjoint, ZeroMeanHelperRemovesWeightedMean) {
    const Vector F = (Vector(4) << 0.1, 0.2, 0.3, 0.4).finished();
    const Vector x = (Vector(4) << 1.0, -2.0, 3.0, 5.0).finished();
    const Vector y = zero_mean(x, F);
    EXPECT_NEAR(F.dot(y), 0.0, 1e-15);
    EXPECT_NEAR((x - y).maxCoeff(), (x - y).minCoeff(), 1e-15);
}

class DynamicGradientFd : public ::testing::TestWithParam<double> {};

TEST_P(DynamicGradientFd, MatchesFiniteDifferences) {
    const double theta = GetParam();
    const Mesh mesh = st::structured_square(6, -1.0, -1.0, 2.0);
    ASSERT_LE(mesh.num_vertices(), 60u);
    const auto ops = assemble_operators(mesh, 1.0, drift_field(DriftKind::Cellular));
    std::mt19937_64 rng(17);
    OcpConfig cfg;
    cfg.theta = theta;
    cfg.dt = 0.05;
    cfg.T = 0.25;
    StaticSolution ref;
    ref.u_star = st::random_control(ops.size(), rng, 0.5);
    ref.q_star = solve_equilibrium(ops, ref.u_star).q;
    const auto q0 = normalized_density(nodal_gaussian(mesh, {-0.5, -0.5}, 0.4), ops.F);

    TimeVaryingControl c;
    c.dt = cfg.dt;
    for (int n = 0; n <= 5; ++n) c.controls.push_back(st::random_control(ops.size(), rng, 1.0));
    const auto dg = dynamic_gradient(ops, q0, c, ref, cfg);
    ASSERT_EQ(dg.grad.size(), 6u);

    const Vector x = flatten(c);
    auto J = [&](const Vector& y) {
        const auto cy = unflatten(y, 6, cfg.dt);
        const auto traj = simulate(ops, q0, cy.schedule(), cy.T(), cfg.theta_options());
        return evaluate_dynamic_cost(ops, traj, cy, ref, cfg);
    };
    EXPECT_NEAR(J(x), dg.J, 1e-14);
    TimeVaryingControl g;
    g.dt = cfg.dt;
    g.controls = dg.grad;
    const Vector grad = flatten(g);
    for (int k = 0; k < 10; ++k) {
        const Vector d = unit_direction(x.size(), rng);
        EXPECT_LT(st::directional_fd_error(J, x, d, grad.dot(d)), 1e-5) << "direction " << k;
    }
}

INSTANTIATE_TEST_SUITE_P(Theta, DynamicGradientFd, ::testing::Values(0.5, 1.0));

TEST(DynamicAdjoint, TerminalAdjointVanishesAndHasZeroMean) {
    const Mesh mesh = st::structured_square(5);
    const auto ops = assemble_operators(mesh, 1.0);
    const auto q0 = normalized_density(nodal_gaussian(mesh, {0.2, 0.2}, 0.2), ops.F);
    const auto ref = normalized_density(nodal_uniform(mesh), ops.F);
    std::mt19937_64 rng(8);
    const ControlSchedule u(st::random_control(ops.size(), rng, 1.0));
    const auto traj = simulate(ops, q0, u, 0.2, {0.05, 1.0, true});
    const auto adj = solve_adjoint_dynamic(ops, traj, u, ref, 1.0);
    ASSERT_EQ(adj.lambda.size(), 5u);
    EXPECT_EQ(adj.lambda.back().cwiseAbs().maxCoeff(), 0.0);
    for (const auto& l : adj.lambda) EXPECT_LT(std::abs(ops.F.dot(l)), 1e-12 * std::max(1.0, l.norm()));
}
