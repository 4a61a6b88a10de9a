#include "swarmctl/presets.hpp"

#include <cmath>
#include <numbers>

#include "swarmctl/error.hpp"
#include "swarmctl/io.hpp"

namespace swarmctl {

Mesh MeshSpec::build() const {
    if (file) return load_mesh(*file);
    return generate_rect_mesh(domain, h, holes);
}

DensitySpec DensitySpec::gaussian(Point c, double s) {
    DensitySpec d;
    d.kind = DensityKind::Gaussian;
    d.center = c;
    d.sigma = s;
    return d;
}

DensitySpec DensitySpec::indicator(std::vector<Rect> r) {
    DensitySpec d;
    d.kind = DensityKind::Indicator;
    d.regions = std::move(r);
    return d;
}

DensityField build_density(const DensitySpec& spec, const Mesh& mesh, const Vector& F) {
    switch (spec.kind) {
        case DensityKind::Uniform: return normalized_density(nodal_uniform(mesh), F);
        case DensityKind::Gaussian: return normalized_density(nodal_gaussian(mesh, spec.center, spec.sigma), F);
        case DensityKind::Indicator: return normalized_density(nodal_indicator(mesh, spec.regions), F);
        case DensityKind::NodalFile: return normalized_density(read_nodal_csv(spec.file, mesh.num_vertices()), F);
    }
    throw Error("unknown density kind");
}

VelocityField drift_field(DriftKind kind) {
    if (kind == DriftKind::None) return {};
    return [](double x, double y) -> std::array<double, 2> {
        constexpr double pi = std::numbers::pi;
        return {-std::sin(pi * x) * std::cos(pi * y), std::cos(pi * x) * std::sin(pi * y)};
    };
}

TestCase testcase_preset(int id, bool fine_scale) {
    TestCase tc;
    tc.id = id;
    tc.ocp.alpha = 1.0;
    tc.ocp.beta = 1e-3;
    tc.ocp.beta_g = 1e-5;
    tc.ocp.mu = 1.0;
    tc.ocp.dt = 0.03;
    tc.ocp.T = 3.0;
    tc.ocp.theta = 1.0;
    tc.ocp.tol = 1e-6;
    tc.ocp.max_iter = 1000;
    tc.ocp.dynamic_max_iter = 100;
    switch (id) {
        case 1:
            tc.mesh.holes = {Circle{{0.0, 0.0}, 0.2}};
            tc.mesh.h = fine_scale ? 0.043 : 0.065;
            tc.target = DensitySpec::indicator({{0.3, -0.9, 0.9, 0.9}});
            tc.initial = {{"gaussian_sw", DensitySpec::gaussian({-0.5, -0.5}, 0.15)},
                          {"gaussian_nw", DensitySpec::gaussian({-0.5, 0.5}, 0.15)},
                          {"uniform", DensitySpec::uniform()}};
            break;
        case 2:
            tc.mesh.holes = {Rect{-0.1, -0.8, 0.1, 0.8}};
            tc.mesh.h = fine_scale ? 0.043 : 0.065;
            tc.target = DensitySpec::indicator({{-0.8, -0.3, -0.4, 0.3}, {0.4, -0.3, 0.8, 0.3}});
            tc.initial = {{"left_gaussian", DensitySpec::gaussian({-0.6, 0.0}, 0.15)}};
            tc.long_horizon = 100.0;
            tc.threshold_fraction = 0.1;
            break;
        case 3:
            tc.mesh.holes = {Circle{{-0.5, 0.5}, 0.15}, Rect{-0.15, -0.15, 0.15, 0.15}, Circle{{-0.1, -0.6}, 0.12}};
            tc.mesh.h = fine_scale ? 0.036 : 0.065;
            tc.target = DensitySpec::indicator({{0.3, 0.1, 0.9, 0.9}, {0.3, -0.9, 0.9, -0.1}});
            tc.initial = {{"square_sw", DensitySpec::indicator({{-0.9, -0.9, -0.5, -0.5}})}};
            tc.drift = DriftKind::Cellular;
            break;
        default: throw ConfigError({"test case must be 1, 2 or 3, got " + std::to_string(id)});
    }
    return tc;
}

}  // namespace swarmctl
