#include "swarmctl/fem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "swarmctl/error.hpp"
#include "swarmctl/io.hpp"

namespace swarmctl {

namespace {

// Position of (row, col) in the value array of a compressed column-major matrix.
int find_slot(const SparseMatrix& m, int row, int col) {
    const int* begin = m.innerIndexPtr() + m.outerIndexPtr()[col];
    const int* end = m.innerIndexPtr() + m.outerIndexPtr()[col + 1];
    const int* it = std::lower_bound(begin, end, row);
    if (it == end || *it != row) throw TopologyError("entry outside the assembly pattern");
    return static_cast<int>(it - m.innerIndexPtr());
}

// Seven-point rule, exact for polynomials of degree 5 on a triangle.
// Barycentric coordinates and weights relative to the triangle area.
struct QuadPoint {
    double l0, l1, l2, w;
};

std::array<QuadPoint, 7> degree5_rule() {
    const double s = std::sqrt(15.0);
    const double a1 = (6.0 - s) / 21.0, w1 = (155.0 - s) / 1200.0;
    const double a2 = (6.0 + s) / 21.0, w2 = (155.0 + s) / 1200.0;
    return {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
             {a1, a1, 1.0 - 2.0 * a1, w1},
             {a1, 1.0 - 2.0 * a1, a1, w1},
             {1.0 - 2.0 * a1, a1, a1, w1},
             {a2, a2, 1.0 - 2.0 * a2, w2},
             {a2, 1.0 - 2.0 * a2, a2, w2},
             {1.0 - 2.0 * a2, a2, a2, w2}}};
}

SparseMatrix with_values(const SparseMatrix& pattern, const std::vector<double>& values) {
    SparseMatrix m = pattern;
    std::copy(values.begin(), values.end(), m.valuePtr());
    return m;
}

void require_control_size(const AdvectionTensor& tensor, const ControlField& u) {
    if (u.ux.size() != tensor.n || u.uy.size() != tensor.n)
        throw DimensionError("control has " + std::to_string(u.ux.size()) + "+" + std::to_string(u.uy.size()) +
                             " coefficients, expected " + std::to_string(tensor.n) + " per component");
}

}  // namespace

std::array<std::array<double, 2>, 3> p1_gradients(const Mesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles()[t];
    const auto& V = mesh.vertices();
    const double two_area = 2.0 * mesh.triangle_area(t);
    std::array<std::array<double, 2>, 3> g{};
    for (int a = 0; a < 3; ++a) {
        const auto& pb = V[tri[(a + 1) % 3]];
        const auto& pc = V[tri[(a + 2) % 3]];
        g[a] = {(pb.y - pc.y) / two_area, (pc.x - pb.x) / two_area};
    }
    return g;
}

FemOperators assemble_operators(const Mesh& mesh, double mu, const VelocityField& drift) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw GeometryError("diffusion coefficient mu must be positive");
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    const auto& T = mesh.triangles();

    FemOperators ops;
    ops.mu = mu;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * T.size());
    for (const auto& t : T)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) trip.emplace_back(t[a], t[b], 0.0);
    SparseMatrix pattern(n, n);
    pattern.setFromTriplets(trip.begin(), trip.end());
    pattern.makeCompressed();

    const auto nnz = static_cast<std::size_t>(pattern.nonZeros());
    std::vector<double> stiff(nnz, 0.0), mass(nnz, 0.0), drift_vals(nnz, 0.0);
    const auto rule = degree5_rule();

    struct Entry {
        int i, j, k;
        double bx, by;
    };
    std::vector<Entry> raw;
    raw.reserve(27 * T.size());

    for (std::size_t e = 0; e < T.size(); ++e) {
        const auto& t = T[e];
        const double area = mesh.triangle_area(e);
        const auto g = p1_gradients(mesh, e);
        std::array<std::array<int, 3>, 3> slot{};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) slot[a][b] = find_slot(pattern, t[a], t[b]);

        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                stiff[slot[a][b]] += area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                mass[slot[a][b]] += area / 12.0 * (a == b ? 2.0 : 1.0);
            }

        // The integrand (d phi_a) phi_b phi_c is quadratic, so the closed form
        // |T|/12 (1 + delta_bc) of the P1 product integral is exact.
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) {
                    const double w = area / 12.0 * (b == c ? 2.0 : 1.0);
                    raw.push_back({t[a], t[b], t[c], g[a][0] * w, g[a][1] * w});
                }

        if (drift) {
            const auto& V = mesh.vertices();
            for (const auto& qp : rule) {
                const double x = qp.l0 * V[t[0]].x + qp.l1 * V[t[1]].x + qp.l2 * V[t[2]].x;
                const double y = qp.l0 * V[t[0]].y + qp.l1 * V[t[1]].y + qp.l2 * V[t[2]].y;
                const auto b = drift(x, y);
                if (!std::isfinite(b[0]) || !std::isfinite(b[1]))
                    throw Error("drift field is not finite at (" + format_double(x) + ", " + format_double(y) + ")");
                const std::array<double, 3> phi{qp.l0, qp.l1, qp.l2};
                for (int a = 0; a < 3; ++a) {
                    const double bg = b[0] * g[a][0] + b[1] * g[a][1];
                    for (int c = 0; c < 3; ++c) drift_vals[slot[a][c]] += qp.w * area * bg * phi[c];
                }
            }
        }
    }

    ops.A = with_values(pattern, stiff);
    ops.A_u = ops.A;
    ops.A *= mu;
    ops.M = with_values(pattern, mass);
    ops.M_u = ops.M;
    ops.F = ops.M * Vector::Ones(n);
    ops.M_lumped = ops.F;
    if (drift) ops.B_drift = with_values(pattern, drift_vals);

    std::sort(raw.begin(), raw.end(), [](const Entry& l, const Entry& r) {
        return std::tie(l.i, l.j, l.k) < std::tie(r.i, r.j, r.k);
    });
    auto& tensor = ops.tensor;
    tensor.n = n;
    for (std::size_t s = 0; s < raw.size();) {
        std::size_t e = s;
        double bx = 0.0, by = 0.0;
        while (e < raw.size() && raw[e].i == raw[s].i && raw[e].j == raw[s].j && raw[e].k == raw[s].k) {
            bx += raw[e].bx;
            by += raw[e].by;
            ++e;
        }
        tensor.i.push_back(raw[s].i);
        tensor.j.push_back(raw[s].j);
        tensor.k.push_back(raw[s].k);
        tensor.bx.push_back(bx);
        tensor.by.push_back(by);
        tensor.slot.push_back(find_slot(pattern, raw[s].i, raw[s].j));
        s = e;
    }
    tensor.pattern = std::move(pattern);
    return ops;
}

SparseMatrix contract_tensor(const AdvectionTensor& tensor, const ControlField& u) {
    require_control_size(tensor, u);
    SparseMatrix c = tensor.pattern;
    double* val = c.valuePtr();
    std::fill(val, val + c.nonZeros(), 0.0);
    for (std::size_t e = 0; e < tensor.entries(); ++e)
        val[tensor.slot[e]] += tensor.bx[e] * u.ux[tensor.k[e]] + tensor.by[e] * u.uy[tensor.k[e]];
    return c;
}

SparseMatrix contract_tensor_transposed(const AdvectionTensor& tensor, const ControlField& u) {
    return SparseMatrix(contract_tensor(tensor, u).transpose());
}

ControlField gradient_contraction(const AdvectionTensor& tensor, const Vector& lambda, const Vector& q) {
    if (lambda.size() != tensor.n || q.size() != tensor.n)
        throw DimensionError("gradient contraction needs vectors of length " + std::to_string(tensor.n));
    auto g = ControlField::zeros(tensor.n);
    for (std::size_t e = 0; e < tensor.entries(); ++e) {
        const double w = lambda[tensor.i[e]] * q[tensor.j[e]];
        g.ux[tensor.k[e]] += tensor.bx[e] * w;
        g.uy[tensor.k[e]] += tensor.by[e] * w;
    }
    return g;
}

SparseMatrix state_matrix(const FemOperators& ops, const ControlField& u) {
    SparseMatrix L = contract_tensor(ops.tensor, u);
    const auto nnz = static_cast<std::size_t>(L.nonZeros());
    double* l = L.valuePtr();
    const double* a = ops.A.valuePtr();
    for (std::size_t s = 0; s < nnz; ++s) l[s] = a[s] - l[s];
    if (ops.B_drift) {
        const double* b = ops.B_drift->valuePtr();
        for (std::size_t s = 0; s < nnz; ++s) l[s] -= b[s];
    }
    return L;
}

void write_coordinate(const SparseMatrix& m, std::ostream& out) {
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
}

}  // namespace swarmctl
