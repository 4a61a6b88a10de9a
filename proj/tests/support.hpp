#pragma once

// Independent oracles shared by the unit and acceptance tests. Nothing here
// calls into the library's assembly code.

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "swarmctl/fields.hpp"
#include "swarmctl/mesh.hpp"

namespace swarmctl::testing {

/// n x n squares on [0,1]^2, each split along the same diagonal.
inline Mesh structured_square(int n, double x0 = 0.0, double y0 = 0.0, double side = 1.0) {
    std::vector<Point> v;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) v.push_back({x0 + side * i / n, y0 + side * j / n});
    std::vector<Triangle> t;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return Mesh(std::move(v), std::move(t));
}

inline ControlField random_control(Eigen::Index n, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> d(0.0, scale);
    ControlField u = ControlField::zeros(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        u.ux[i] = d(rng);
        u.uy[i] = d(rng);
    }
    return u;
}

inline Vector random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

/// Exact integral of l0^a l1^b l2^c over a triangle of area `area`:
/// 2 area a! b! c! / (a + b + c + 2)!.
inline double barycentric_monomial(double area, int a, int b, int c) {
    return 2.0 * area * std::tgamma(a + 1) * std::tgamma(b + 1) * std::tgamma(c + 1) / std::tgamma(a + b + c + 3);
}

inline double triangle_area(const Point& a, const Point& b, const Point& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

/// Gradients of the barycentric coordinates from edge normals:
/// grad l_a = perp(p_c - p_b) / (2 area) with (a, b, c) cyclic.
inline std::array<std::array<double, 2>, 3> barycentric_gradients(const Point& p0, const Point& p1, const Point& p2) {
    const double twice = 2.0 * triangle_area(p0, p1, p2);
    const std::array<Point, 3> p{p0, p1, p2};
    std::array<std::array<double, 2>, 3> g{};
    for (int a = 0; a < 3; ++a) {
        const Point& b = p[(a + 1) % 3];
        const Point& c = p[(a + 2) % 3];
        g[a] = {(b.y - c.y) / twice, (c.x - b.x) / twice};
    }
    return g;
}

/// Dense consistent mass matrix from the monomial formula.
inline Eigen::MatrixXd dense_mass(const Mesh& mesh) {
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : mesh.triangles()) {
        const double area = triangle_area(mesh.vertices()[t[0]], mesh.vertices()[t[1]], mesh.vertices()[t[2]]);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                std::array<int, 3> e{0, 0, 0};
                ++e[a];
                ++e[b];
                M(t[a], t[b]) += barycentric_monomial(area, e[0], e[1], e[2]);
            }
    }
    return M;
}

/// Dense stiffness (without mu).
inline Eigen::MatrixXd dense_stiffness(const Mesh& mesh) {
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : mesh.triangles()) {
        const auto& V = mesh.vertices();
        const double area = triangle_area(V[t[0]], V[t[1]], V[t[2]]);
        const auto g = barycentric_gradients(V[t[0]], V[t[1]], V[t[2]]);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) A(t[a], t[b]) += area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
    }
    return A;
}

/// Dense C(u)_ij = sum_k integral of (u_k . grad phi_i) phi_j phi_k.
inline Eigen::MatrixXd dense_advection(const Mesh& mesh, const ControlField& u) {
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : mesh.triangles()) {
        const auto& V = mesh.vertices();
        const double area = triangle_area(V[t[0]], V[t[1]], V[t[2]]);
        const auto g = barycentric_gradients(V[t[0]], V[t[1]], V[t[2]]);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) {
                    std::array<int, 3> e{0, 0, 0};
                    ++e[b];
                    ++e[c];
                    const double w = barycentric_monomial(area, e[0], e[1], e[2]);
                    C(t[a], t[b]) += w * (g[a][0] * u.ux[t[c]] + g[a][1] * u.uy[t[c]]);
                }
    }
    return C;
}

/// Dense drift matrix for a field that is linear in x and y, written as
/// its vertex interpolant (exact for linear fields).
template <class Field>
Eigen::MatrixXd dense_linear_drift(const Mesh& mesh, Field b) {
    ControlField u = ControlField::zeros(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const auto v = b(mesh.vertices()[i].x, mesh.vertices()[i].y);
        u.ux[static_cast<Eigen::Index>(i)] = v[0];
        u.uy[static_cast<Eigen::Index>(i)] = v[1];
    }
    return dense_advection(mesh, u);
}

/// Null vector of a dense matrix by SVD, normalized to F^T v = 1.
inline Vector dense_kernel(const Eigen::MatrixXd& L, const Vector& F) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L, Eigen::ComputeFullV);
    Vector v = svd.matrixV().col(L.cols() - 1);
    return v / F.dot(v);
}

/// Relative error between grad^T d and central differences of f along d,
/// minimized over step sizes 1e-3 ... 1e-6.
template <class F>
double directional_fd_error(F&& f, const Vector& x, const Vector& d, double analytic) {
    double best = std::numeric_limits<double>::infinity();
    for (double h : {1e-3, 1e-4, 1e-5, 1e-6}) {
        const double fd = (f(x + h * d) - f(x - h * d)) / (2.0 * h);
        best = std::min(best, std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-300));
    }
    return best;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace swarmctl::testing
