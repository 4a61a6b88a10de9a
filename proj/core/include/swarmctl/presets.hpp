#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swarmctl/ocp_static.hpp"

namespace swarmctl {

struct MeshSpec {
    std::optional<std::filesystem::path> file;  // takes precedence over the generator fields
    Rect domain{-1.0, -1.0, 1.0, 1.0};
    double h = 0.1;
    std::vector<Hole> holes;

    Mesh build() const;
};

enum class DensityKind { Uniform, Gaussian, Indicator, NodalFile };

struct DensitySpec {
    DensityKind kind = DensityKind::Uniform;
    Point center;                 // gaussian
    double sigma = 0.15;          // gaussian
    std::vector<Rect> regions;    // indicator
    std::filesystem::path file;   // nodal CSV

    static DensitySpec uniform() { return {}; }
    static DensitySpec gaussian(Point c, double s);
    static DensitySpec indicator(std::vector<Rect> r);
};

/// Nodal values of the spec, normalized to unit mass.
DensityField build_density(const DensitySpec& spec, const Mesh& mesh, const Vector& F);

enum class DriftKind { None, Cellular };

/// Cellular drift b = (-sin(pi x) cos(pi y), cos(pi x) sin(pi y)); empty for None.
VelocityField drift_field(DriftKind kind);

struct NamedDensity {
    std::string name;
    DensitySpec spec;
};

struct TestCase {
    int id = 0;
    MeshSpec mesh;
    DensitySpec target;
    std::vector<NamedDensity> initial;  // first entry drives the dynamic problem
    DriftKind drift = DriftKind::None;
    OcpConfig ocp;
    double long_horizon = 0.0;          // extra static-control run length, 0 for none
    double threshold_fraction = 0.0;    // L2 threshold (fraction of the initial distance) for speedup timing
};

/// Presets for the three obstacle scenarios at desk resolution, or
/// on a finer mesh when `fine_scale` is set.
TestCase testcase_preset(int id, bool fine_scale = false);

}  // namespace swarmctl
