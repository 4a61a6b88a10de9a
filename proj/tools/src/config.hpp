#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmctl/presets.hpp"

namespace swarmctl::cli {

enum class ControlSource { Solve, Zero, Directory };

struct ParticleOptions {
    std::size_t count = 100000;
    std::optional<double> dt;   // defaults to the PDE dt
    std::optional<double> T;    // defaults to the OCP horizon
    std::size_t checkpoints = 5;
};

struct RunConfig {
    int testcase = 0;  // 0 for a free-form run
    MeshSpec mesh;
    DensitySpec target;
    std::vector<NamedDensity> initial{{"initial", DensitySpec::uniform()}};
    DriftKind drift = DriftKind::None;
    OcpConfig ocp;
    double long_horizon = 0.0;
    double threshold_fraction = 0.0;
    ControlSource control = ControlSource::Solve;
    std::filesystem::path control_dir;
    ParticleOptions particles;
    std::size_t snapshot_every = 10;
    std::filesystem::path out = "swarmctl_out";
    std::uint64_t seed = 0;

    /// Every invalid value or missing file, empty when the config is usable.
    std::vector<std::string> problems() const;
    void validate() const;
};

/// Parses a config object. Relative paths are resolved against `base_dir`.
/// Throws ConfigError listing every problem found.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form; parse_config(to_json(c)) reproduces c exactly.
nlohmann::json to_json(const RunConfig& config);

/// Preset test case expressed as a run config.
RunConfig testcase_config(int id, bool fine_scale);

}  // namespace swarmctl::cli
