#pragma once

#include <filesystem>

#include "swarmctl/ocp_dynamic.hpp"

namespace swarmctl {

/// Writes `manifest.csv` (step,time,mass,min_q,l2_dist_to_target) for every
/// step and `q_<step>.csv` snapshots (node_index,x,y,q) for every
/// `snapshot_every`-th step plus the last one. `snapshot_every == 0` writes
/// the manifest only.
void write_trajectory(const std::filesystem::path& dir, const Mesh& mesh, const FemOperators& ops,
                      const Trajectory& trajectory, const DensityField& target, std::size_t snapshot_every = 1);

/// `u_x.csv`, `u_y.csv`, `q_star.csv`, `lambda.csv`, `history.csv` and
/// `solution.vtk` in `dir`.
void write_static_solution(const std::filesystem::path& dir, const Mesh& mesh, const StaticSolution& solution);

/// Reads u_x.csv / u_y.csv written by write_static_solution.
ControlField read_control(const std::filesystem::path& dir, std::size_t nodes);

/// `controls/u_<n>.csv` (node_index,x,y,ux,uy) per time node, `trajectory/`
/// as in write_trajectory, `turnpike.csv` and `history.csv`.
void write_dynamic_solution(const std::filesystem::path& dir, const Mesh& mesh, const FemOperators& ops,
                            const DynamicSolution& solution, const DensityField& reference);

void write_history(const std::filesystem::path& path, const std::vector<IterationRecord>& history);

/// Five-digit zero-padded index, e.g. 7 -> "00007".
std::string padded(std::size_t index);

}  // namespace swarmctl
