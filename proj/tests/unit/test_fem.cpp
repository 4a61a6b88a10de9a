#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "support.hpp"
#include "swarmctl/fem.hpp"
#include "swarmctl/presets.hpp"

using namespace swarmctl;
namespace st = swarmctl::testing;

namespace {

Mesh holed_mesh(double h = 0.3) {
    const Hole hole = Circle{{0.1, -0.1}, 0.3};
    return generate_rect_mesh({-1, -1, 1, 1}, h, std::span<const Hole>(&hole, 1));
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(FemAssembly, MassMatchesMonomialOracle) {
    const Mesh mesh = holed_mesh();
    const auto ops = assemble_operators(mesh, 1.0);
    const Eigen::MatrixXd M = st::dense_mass(mesh);
    EXPECT_LT(max_abs(Eigen::MatrixXd(ops.M) - M), 1e-15);
    EXPECT_LT(max_abs(Eigen::MatrixXd(ops.M_u) - M), 1e-15);
    EXPECT_NEAR(ops.F.sum(), mesh.domain_area(), 1e-13);
    EXPECT_LT((ops.F - M.rowwise().sum()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((ops.M_lumped - ops.F).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FemAssembly, StiffnessMatchesOracleAndScalesWithMu) {
    const Mesh mesh = holed_mesh();
    const double mu = 0.37;
    const auto ops = assemble_operators(mesh, mu);
    const Eigen::MatrixXd A = st::dense_stiffness(mesh);
    EXPECT_LT(max_abs(Eigen::MatrixXd(ops.A) - mu * A), 1e-13);
    EXPECT_LT(max_abs(Eigen::MatrixXd(ops.A_u) - A), 1e-13);
    EXPECT_LT((ops.A * Vector::Ones(ops.size())).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(FemAssembly, TensorContractionMatchesOracle) {
    const Mesh mesh = holed_mesh();
    const auto ops = assemble_operators(mesh, 1.0);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 3; ++trial) {
        const ControlField u = st::random_control(ops.size(), rng, 2.0);
        const Eigen::MatrixXd C = st::dense_advection(mesh, u);
        EXPECT_LT(max_abs(Eigen::MatrixXd(contract_tensor(ops.tensor, u)) - C), 1e-13);
        EXPECT_LT(max_abs(Eigen::MatrixXd(contract_tensor_transposed(ops.tensor, u)) - C.transpose()), 1e-13);
    }
}

TEST(FemAssembly, LinearDriftIsIntegratedExactly) {
    const Mesh mesh = holed_mesh();
    auto b = [](double x, double y) { return std::array<double, 2>{0.3 * x - y, 0.5 + 0.2 * y}; };
    const auto ops = assemble_operators(mesh, 1.0, b);
    ASSERT_TRUE(ops.B_drift.has_value());
    EXPECT_LT(max_abs(Eigen::MatrixXd(*ops.B_drift) - st::dense_linear_drift(mesh, b)), 1e-13);
}

TEST(FemAssembly, MatricesShareOnePattern) {
    const Mesh mesh = holed_mesh();
    const auto ops = assemble_operators(mesh, 1.0, drift_field(DriftKind::Cellular));
    const auto nnz = ops.tensor.pattern.nonZeros();
    EXPECT_EQ(ops.A.nonZeros(), nnz);
    EXPECT_EQ(ops.M.nonZeros(), nnz);
    EXPECT_EQ(ops.B_drift->nonZeros(), nnz);
    std::mt19937_64 rng(3);
    EXPECT_EQ(state_matrix(ops, st::random_control(ops.size(), rng, 1.0)).nonZeros(), nnz);
}

TEST(FemAssembly, StateMatrixColumnsSumToZero) {
    const Mesh mesh = holed_mesh(0.2);
    const auto ops = assemble_operators(mesh, 1.0, drift_field(DriftKind::Cellular));
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const SparseMatrix L = state_matrix(ops, st::random_control(ops.size(), rng, 5.0));
        const Vector colsum = Vector::Ones(ops.size()).transpose() * L;
        double norm = 0.0;
        for (Eigen::Index r = 0; r < L.rows(); ++r) norm = std::max(norm, L.row(r).cwiseAbs().sum());
        EXPECT_LT(colsum.cwiseAbs().maxCoeff(), 1e-12 * norm);
    }
}

TEST(FemAssembly, StateMatrixMatchesDenseComposition) {
    const Mesh mesh = holed_mesh();
    auto b = [](double x, double y) { return std::array<double, 2>{-y, x}; };
    const auto ops = assemble_operators(mesh, 0.8, b);
    std::mt19937_64 rng(5);
    const ControlField u = st::random_control(ops.size(), rng, 1.0);
    const Eigen::MatrixXd L =
        0.8 * st::dense_stiffness(mesh) - st::dense_advection(mesh, u) - st::dense_linear_drift(mesh, b);
    EXPECT_LT(max_abs(Eigen::MatrixXd(state_matrix(ops, u)) - L), 1e-13);
}

TEST(FemAssembly, GradientContractionIsAdjointOfTensor) {
    // lambda^T C(u) q is linear in u; its coefficients are the contraction.
    const Mesh mesh = holed_mesh();
    const auto ops = assemble_operators(mesh, 1.0);
    std::mt19937_64 rng(13);
    const Vector lambda = st::random_vector(ops.size(), rng);
    const Vector q = st::random_vector(ops.size(), rng);
    const ControlField g = gradient_contraction(ops.tensor, lambda, q);
    for (int trial = 0; trial < 4; ++trial) {
        const ControlField u = st::random_control(ops.size(), rng, 1.0);
        const double direct = lambda.dot(st::dense_advection(mesh, u) * q);
        EXPECT_LT(st::rel_err(direct, dot(g, u)), 1e-12);
    }
}

TEST(FemAssembly, LocalGradientsMatchEdgeNormals) {
    const Mesh mesh = holed_mesh();
    for (std::size_t t = 0; t < mesh.num_triangles(); t += 7) {
        const auto& tri = mesh.triangles()[t];
        const auto& V = mesh.vertices();
        const auto expected = st::barycentric_gradients(V[tri[0]], V[tri[1]], V[tri[2]]);
        const auto got = p1_gradients(mesh, t);
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 2; ++c) EXPECT_NEAR(got[a][c], expected[a][c], 1e-12);
    }
}

TEST(FemAssembly, CoordinateOutputListsEveryNonzero) {
    const Mesh mesh = st::structured_square(2);
    const auto ops = assemble_operators(mesh, 1.0);
    std::ostringstream out;
    write_coordinate(ops.M, out);
    std::istringstream in(out.str());
    std::string line;
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(ops.size(), ops.size());
    int lines = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        int r = 0, c = 0;
        double v = 0.0;
        ls >> r >> c >> v;
        rebuilt(r, c) = v;
        ++lines;
    }
    EXPECT_EQ(lines, ops.M.nonZeros());
    EXPECT_EQ(rebuilt, Eigen::MatrixXd(ops.M));
}
