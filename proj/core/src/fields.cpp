#include "swarmctl/fields.hpp"

#include <cmath>

#include "swarmctl/error.hpp"

namespace swarmctl {

DensityField::DensityField(Vector v, const Vector& F) : values(std::move(v)) {
    if (values.size() != F.size())
        throw DimensionError("density has " + std::to_string(values.size()) + " entries, mass vector has " +
                             std::to_string(F.size()));
    mass = F.dot(values);
}

DensityField normalized_density(Vector values, const Vector& F) {
    if (values.size() != F.size())
        throw DimensionError("density has " + std::to_string(values.size()) + " entries, mass vector has " +
                             std::to_string(F.size()));
    const double m = F.dot(values);
    if (!(m > 0.0) || !std::isfinite(m)) throw GeometryError("density has no positive mass on the mesh");
    values /= m;
    return DensityField(std::move(values), F);
}

ControlField ControlField::zeros(Eigen::Index n) { return {Vector::Zero(n), Vector::Zero(n)}; }

ControlField ControlField::from_flat(const Vector& flat) {
    if (flat.size() % 2 != 0) throw DimensionError("flat control vector has odd length");
    const auto n = flat.size() / 2;
    return {flat.head(n), flat.tail(n)};
}

Vector ControlField::flat() const {
    Vector out(2 * ux.size());
    out << ux, uy;
    return out;
}

double ControlField::max_magnitude() const {
    if (ux.size() == 0) return 0.0;
    return (ux.array().square() + uy.array().square()).sqrt().maxCoeff();
}

ControlField& ControlField::operator+=(const ControlField& o) {
    ux += o.ux;
    uy += o.uy;
    return *this;
}

ControlField& ControlField::operator-=(const ControlField& o) {
    ux -= o.ux;
    uy -= o.uy;
    return *this;
}

ControlField& ControlField::operator*=(double s) {
    ux *= s;
    uy *= s;
    return *this;
}

double dot(const ControlField& a, const ControlField& b) { return a.ux.dot(b.ux) + a.uy.dot(b.uy); }

Vector nodal_uniform(const Mesh& mesh) { return Vector::Ones(static_cast<Eigen::Index>(mesh.num_vertices())); }

Vector nodal_gaussian(const Mesh& mesh, Point center, double sigma) {
    if (!(sigma > 0.0)) throw GeometryError("gaussian sigma must be positive");
    Vector v(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const auto& p = mesh.vertices()[i];
        const double r2 = (p.x - center.x) * (p.x - center.x) + (p.y - center.y) * (p.y - center.y);
        v[static_cast<Eigen::Index>(i)] = std::exp(-0.5 * r2 / (sigma * sigma));
    }
    return v;
}

Vector nodal_indicator(const Mesh& mesh, const std::vector<Rect>& regions) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        const auto& p = mesh.vertices()[i];
        for (const auto& r : regions)
            if (p.x >= r.x0 && p.x <= r.x1 && p.y >= r.y0 && p.y <= r.y1) v[static_cast<Eigen::Index>(i)] = 1.0;
    }
    return v;
}

}  // namespace swarmctl
