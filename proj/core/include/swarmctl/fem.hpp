#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "swarmctl/fields.hpp"
#include "swarmctl/mesh.hpp"

namespace swarmctl {

/// Analytic 2D vector field evaluated at (x, y).
using VelocityField = std::function<std::array<double, 2>(double x, double y)>;

/// Rank-3 tensors B_x, B_y with entries
///   B_{x,ijk} = integral of (d phi_i / dx) phi_j phi_k
/// stored as a coordinate list over triples of nodes sharing a triangle.
/// Each entry also carries the position of (i, j) in `pattern`, so
/// contractions write straight into the value array of a sparse matrix.
struct AdvectionTensor {
    Eigen::Index n = 0;
    SparseMatrix pattern;         // every (i, j) that share a triangle, values zero
    std::vector<int> i, j, k;
    std::vector<double> bx, by;
    std::vector<int> slot;        // index of (i, j) in pattern.valuePtr()

    std::size_t entries() const { return i.size(); }
};

struct FemOperators {
    double mu = 1.0;
    SparseMatrix A;         // mu-scaled stiffness
    SparseMatrix M;         // consistent mass
    Vector M_lumped;        // diagonal of the lumped mass (row sums of M)
    Vector F;               // F = M * 1
    AdvectionTensor tensor;
    SparseMatrix M_u;       // control-space mass
    SparseMatrix A_u;       // control-space stiffness (unscaled)
    std::optional<SparseMatrix> B_drift;  // B_{ij} = integral of (b . grad phi_i) phi_j

    Eigen::Index size() const { return F.size(); }
};

/// Assembles every operator on P1 elements. All sparse matrices share the
/// pattern of `tensor.pattern`.
FemOperators assemble_operators(const Mesh& mesh, double mu, const VelocityField& drift = {});

/// Returns C with C_ij = sum_k B_{x,ijk} u_{x,k} + B_{y,ijk} u_{y,k}.
SparseMatrix contract_tensor(const AdvectionTensor& tensor, const ControlField& u);
SparseMatrix contract_tensor_transposed(const AdvectionTensor& tensor, const ControlField& u);

/// g_{c,k} = sum_ij lambda_i B_{c,ijk} q_j for c in {x, y}.
ControlField gradient_contraction(const AdvectionTensor& tensor, const Vector& lambda, const Vector& q);

/// State matrix L(u) = A - contract_tensor(u) - B_drift. Rows are test
/// functions, so 1^T L(u) = 0 for every u and the semi-discrete dynamics
/// read M q' + L(u) q = 0.
SparseMatrix state_matrix(const FemOperators& ops, const ControlField& u);

/// `row col value` lines, 0-based, shortest round-trip decimals.
void write_coordinate(const SparseMatrix& m, std::ostream& out);

/// P1 gradients of the three local basis functions: {dphi/dx, dphi/dy}.
std::array<std::array<double, 2>, 3> p1_gradients(const Mesh& mesh, std::size_t t);

}  // namespace swarmctl
