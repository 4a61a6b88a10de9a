#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "swarmctl/mesh.hpp"

namespace swarmctl {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Nodal P1 density with its cached total mass F^T q.
struct DensityField {
    Vector values;
    double mass = 0.0;

    DensityField() = default;
    DensityField(Vector v, const Vector& F);

    Eigen::Index size() const { return values.size(); }
    double min() const { return values.size() ? values.minCoeff() : 0.0; }
};

/// Rescales `values` so that F^T q = 1. Throws GeometryError if the mass is not positive.
DensityField normalized_density(Vector values, const Vector& F);

/// Nodal velocity coefficients; u_x and u_y share the state mesh.
struct ControlField {
    Vector ux;
    Vector uy;

    static ControlField zeros(Eigen::Index n);
    static ControlField from_flat(const Vector& flat);

    Eigen::Index nodes() const { return ux.size(); }
    Vector flat() const;

    /// Largest nodal magnitude sqrt(ux^2 + uy^2).
    double max_magnitude() const;

    ControlField& operator+=(const ControlField& o);
    ControlField& operator-=(const ControlField& o);
    ControlField& operator*=(double s);
    friend ControlField operator+(ControlField a, const ControlField& b) { return a += b; }
    friend ControlField operator-(ControlField a, const ControlField& b) { return a -= b; }
    friend ControlField operator*(double s, ControlField a) { return a *= s; }
};

double dot(const ControlField& a, const ControlField& b);

// Nodal interpolants used to build initial and target densities. They are not
// normalized; pass the result through normalized_density.
Vector nodal_uniform(const Mesh& mesh);
Vector nodal_gaussian(const Mesh& mesh, Point center, double sigma);
Vector nodal_indicator(const Mesh& mesh, const std::vector<Rect>& regions);

}  // namespace swarmctl
