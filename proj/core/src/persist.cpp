#include "swarmctl/persist.hpp"

#include <cstdio>

#include "swarmctl/analysis.hpp"
#include "swarmctl/error.hpp"
#include "swarmctl/io.hpp"

namespace swarmctl {

namespace fs = std::filesystem;

std::string padded(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%05zu", index);
    return buf;
}

void write_trajectory(const fs::path& dir, const Mesh& mesh, const FemOperators& ops, const Trajectory& trajectory,
                      const DensityField& target, std::size_t snapshot_every) {
    fs::create_directories(dir);
    CsvWriter manifest(dir / "manifest.csv", {"step", "time", "mass", "min_q", "l2_dist_to_target"});
    const std::size_t N = trajectory.steps();
    for (std::size_t n = 0; n <= N; ++n) {
        const auto& q = trajectory.states[n];
        manifest.cell(n).cell(trajectory.times[n]).cell(ops.F.dot(q.values)).cell(q.min()).cell(
            l2_distance(q, target, ops.M));
        manifest.end_row();
        if (snapshot_every > 0 && (n % snapshot_every == 0 || n == N))
            write_nodal_csv(dir / ("q_" + padded(n) + ".csv"), mesh, q.values, "q");
    }
}

void write_history(const fs::path& path, const std::vector<IterationRecord>& history) {
    CsvWriter w(path, {"iteration", "J", "grad_norm", "step"});
    for (const auto& r : history) {
        w.cell(r.iteration).cell(r.J).cell(r.grad_norm).cell(r.step);
        w.end_row();
    }
}

void write_static_solution(const fs::path& dir, const Mesh& mesh, const StaticSolution& solution) {
    fs::create_directories(dir);
    write_nodal_csv(dir / "u_x.csv", mesh, solution.u_star.ux, "u_x");
    write_nodal_csv(dir / "u_y.csv", mesh, solution.u_star.uy, "u_y");
    write_nodal_csv(dir / "q_star.csv", mesh, solution.q_star.values, "q");
    write_nodal_csv(dir / "lambda.csv", mesh, solution.lambda_q.values, "lambda");
    write_history(dir / "history.csv", solution.history);
    write_vtk(dir / "solution.vtk", mesh,
              {{"q_star", &solution.q_star.values},
               {"lambda", &solution.lambda_q.values},
               {"u_star", nullptr, &solution.u_star.ux, &solution.u_star.uy}});
}

ControlField read_control(const fs::path& dir, std::size_t nodes) {
    return {read_nodal_csv(dir / "u_x.csv", nodes), read_nodal_csv(dir / "u_y.csv", nodes)};
}

void write_dynamic_solution(const fs::path& dir, const Mesh& mesh, const FemOperators& ops,
                            const DynamicSolution& solution, const DensityField& reference) {
    fs::create_directories(dir / "controls");
    const auto& V = mesh.vertices();
    for (std::size_t n = 0; n < solution.control.controls.size(); ++n) {
        const auto& u = solution.control.controls[n];
        CsvWriter w(dir / "controls" / ("u_" + padded(n) + ".csv"), {"node_index", "x", "y", "ux", "uy"});
        for (std::size_t i = 0; i < V.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            w.cell(i).cell(V[i].x).cell(V[i].y).cell(u.ux[k]).cell(u.uy[k]);
            w.end_row();
        }
    }
    write_trajectory(dir / "trajectory", mesh, ops, solution.trajectory, reference);
    CsvWriter tp(dir / "turnpike.csv", {"time", "u_distance", "q_distance"});
    for (const auto& r : solution.turnpike) {
        tp.cell(r.time).cell(r.u_distance).cell(r.q_distance);
        tp.end_row();
    }
    write_history(dir / "history.csv", solution.history);
}

}  // namespace swarmctl
