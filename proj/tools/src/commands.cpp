#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "swarmctl/analysis.hpp"
#include "swarmctl/error.hpp"
#include "swarmctl/io.hpp"
#include "swarmctl/particles.hpp"
#include "swarmctl/persist.hpp"

namespace swarmctl::cli {

namespace fs = std::filesystem;

namespace {

void log(const std::string& line) { std::cout << line << std::endl; }

std::string fmt(double v) { return format_double(v); }

struct Problem {
    Mesh mesh;
    FemOperators ops;
    DensityField target;
    std::vector<std::pair<std::string, DensityField>> initial;

    explicit Problem(const RunConfig& c)
        : mesh(c.mesh.build()), ops(assemble_operators(mesh, c.ocp.mu, drift_field(c.drift))),
          target(build_density(c.target, mesh, ops.F)) {
        for (const auto& d : c.initial) initial.emplace_back(d.name, build_density(d.spec, mesh, ops.F));
        log("mesh: " + std::to_string(mesh.num_vertices()) + " nodes, " + std::to_string(mesh.num_triangles()) +
            " triangles, " + std::to_string(mesh.holes()) + " holes");
        for (const auto& w : mesh.warnings()) log("mesh warning: " + w);
    }
};

// Key/value summary written as summary.csv at the end of a command.
class Summary {
public:
    void add(const std::string& key, double value) { rows_.emplace_back(key, value); }
    void write(const fs::path& path) const {
        CsvWriter w(path, {"metric", "value"});
        for (const auto& [k, v] : rows_) {
            w.cell(k).cell(v);
            w.end_row();
        }
    }

private:
    std::vector<std::pair<std::string, double>> rows_;
};

void begin(const RunConfig& config) {
    config.validate();
    fs::create_directories(config.out);
    std::ofstream echo(config.out / "config.echo");
    echo << to_json(config).dump(2) << '\n';
    if (!echo) throw Error("cannot write config.echo in '" + config.out.string() + "'");
}

// Indexes every file under the output directory (sorted, relative paths).
void write_manifest(const fs::path& out) {
    std::vector<std::pair<std::string, std::uintmax_t>> files;
    for (const auto& e : fs::recursive_directory_iterator(out))
        if (e.is_regular_file() && e.path().filename() != "manifest.csv")
            files.emplace_back(e.path().lexically_relative(out).generic_string(), e.file_size());
    std::sort(files.begin(), files.end());
    CsvWriter w(out / "manifest.csv", {"path", "bytes"});
    for (const auto& [p, b] : files) {
        w.cell(p).cell(static_cast<long long>(b));
        w.end_row();
    }
}

MeshQualityReport print_quality(std::ostream& out, const Mesh& mesh) {
    const auto q = check_mesh_quality(mesh);
    constexpr double deg = 180.0 / std::numbers::pi;
    out << "nodes " << mesh.num_vertices() << "\ntriangles " << mesh.num_triangles() << "\nboundary_loops "
        << mesh.boundary_loops() << "\nholes " << mesh.holes() << "\narea " << fmt(mesh.domain_area())
        << "\nstrict_delaunay " << (q.is_strict_delaunay ? "true" : "false") << "\nmin_angle_deg "
        << fmt(q.min_angle * deg) << "\nmax_opposite_angle_sum_deg " << fmt(q.max_opposite_angle_sum * deg) << '\n';
    if (q.worst_edge) out << "worst_edge " << (*q.worst_edge)[0] << ' ' << (*q.worst_edge)[1] << '\n';
    for (const auto& w : mesh.warnings()) out << "warning " << w << '\n';
    return q;
}

void write_quality(const fs::path& path, const Mesh& mesh) {
    std::ofstream out(path);
    print_quality(out, mesh);
    if (!out) throw Error("cannot write '" + path.string() + "'");
}

StaticSolution run_static(const RunConfig& config, const Problem& p, const fs::path& dir, Summary& summary) {
    const auto t0 = std::chrono::steady_clock::now();
    StaticSolution s = solve_static_ocp(p.ops, p.target, config.ocp);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_static_solution(dir, p.mesh, s);
    const auto uncontrolled = solve_equilibrium(p.ops, ControlField::zeros(p.ops.size()));
    const double d0 = l2_distance(uncontrolled.q, p.target, p.ops.M);
    const double d = l2_distance(s.q_star, p.target, p.ops.M);
    const auto tang = tangency_diagnostic(p.mesh, s.u_star);
    log("static: " + std::to_string(s.history.size() - 1) + " iterations (" + s.message + "), J = " + fmt(s.J()) +
        ", |grad J| = " + fmt(s.grad_norm()) + ", |q* - z| / |q(0) - z| = " + fmt(d / d0) + ", " + fmt(secs) + " s");
    if (s.line_search_failed) log("static warning: " + s.message);
    summary.add("static_iterations", static_cast<double>(s.history.size() - 1));
    summary.add("static_converged", s.converged ? 1.0 : 0.0);
    summary.add("static_J", s.J());
    summary.add("static_grad_norm_initial", s.history.front().grad_norm);
    summary.add("static_grad_norm_final", s.grad_norm());
    summary.add("static_tracking_l2", d);
    summary.add("uncontrolled_tracking_l2", d0);
    summary.add("static_lambda_m", s.lambda_m);
    summary.add("static_u_max", s.u_star.max_magnitude());
    summary.add("static_min_q", s.q_star.min());
    summary.add("tangency_ratio", tang.ratio);
    return s;
}

// Static solution for the configured control source; only "solve" writes a
// static_solution directory.
StaticSolution control_solution(const RunConfig& config, const Problem& p, Summary& summary) {
    if (config.control == ControlSource::Solve) return run_static(config, p, config.out / "static_solution", summary);
    StaticSolution s;
    s.u_star = config.control == ControlSource::Zero ? ControlField::zeros(p.ops.size())
                                                     : read_control(config.control_dir, p.mesh.num_vertices());
    const auto eq = solve_equilibrium(p.ops, s.u_star);
    s.q_star = eq.q;
    s.converged = true;
    s.message = "control loaded";
    return s;
}

ConvergenceReport run_trajectory(const RunConfig& config, const Problem& p, const ControlSchedule& control,
                                 const DensityField& q0, double T, const DensityField& reference,
                                 const fs::path& traj_dir, const fs::path& csv, std::size_t snapshot_every) {
    const auto traj = simulate(p.ops, q0, control, T, config.ocp.theta_options());
    if (!traj_dir.empty()) write_trajectory(traj_dir, p.mesh, p.ops, traj, p.target, snapshot_every);
    auto rep = convergence_report(traj, reference, p.ops.M);
    write_convergence_csv(csv, rep);
    return rep;
}

double long_horizon_end(const RunConfig& config) {
    return std::ceil(config.long_horizon / config.ocp.dt - 1e-9) * config.ocp.dt;
}

}  // namespace

void cmd_mesh_gen(const RunConfig& config) {
    begin(config);
    if (config.mesh.file) throw ConfigError({"mesh gen needs generator fields (domain, h, holes), not 'file'"});
    const Mesh mesh = config.mesh.build();
    save_mesh(mesh, config.out / "mesh.dat");
    write_vtk(config.out / "mesh.vtk", mesh, {});
    write_quality(config.out / "mesh_quality.txt", mesh);
    log("mesh gen: " + std::to_string(mesh.num_vertices()) + " nodes, " + std::to_string(mesh.num_triangles()) +
        " triangles -> " + (config.out / "mesh.dat").string());
    write_manifest(config.out);
}

MeshQualityReport cmd_mesh_check(const fs::path& file, std::ostream& out) {
    return print_quality(out, load_mesh(file));
}

void cmd_static(const RunConfig& config) {
    begin(config);
    const Problem p(config);
    Summary summary;
    write_nodal_csv(config.out / "target.csv", p.mesh, p.target.values, "z");
    run_static(config, p, config.out / "static_solution", summary);
    summary.write(config.out / "summary.csv");
    write_manifest(config.out);
}

void cmd_simulate(const RunConfig& config) {
    begin(config);
    const Problem p(config);
    Summary summary;
    const StaticSolution s = control_solution(config, p, summary);
    write_nodal_csv(config.out / "equilibrium.csv", p.mesh, s.q_star.values, "q");
    const double T = config.long_horizon > 0.0 ? long_horizon_end(config) : config.ocp.T;
    for (const auto& [name, q0] : p.initial) {
        const auto rep = run_trajectory(config, p, ControlSchedule(s.u_star), q0, T, s.q_star,
                                        config.out / ("trajectory_" + name), config.out / ("convergence_" + name + ".csv"),
                                        config.snapshot_every);
        log("simulate " + name + ": |q(T) - q_eq| / |q(0) - q_eq| = " + fmt(rep.final_ratio) +
            ", Lyapunov monotone: " + (rep.lyapunov_monotone ? "yes" : "no"));
        summary.add("final_ratio_" + name, rep.final_ratio);
        summary.add("lyapunov_monotone_" + name, rep.lyapunov_monotone ? 1.0 : 0.0);
    }
    summary.write(config.out / "summary.csv");
    write_manifest(config.out);
}

void cmd_dynamic(const RunConfig& config) {
    begin(config);
    const Problem p(config);
    Summary summary;
    const StaticSolution s = control_solution(config, p, summary);
    const auto& [name, q0] = p.initial.front();
    const auto t0 = std::chrono::steady_clock::now();
    const DynamicSolution d = solve_dynamic_ocp(p.ops, q0, s, config.ocp);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_dynamic_solution(config.out / "dynamic_solution", p.mesh, p.ops, d, s.q_star);
    const auto rs = run_trajectory(config, p, ControlSchedule(s.u_star), q0, config.ocp.T, s.q_star, {},
                                   config.out / "convergence_static.csv", 0);
    const auto rd = convergence_report(d.trajectory, s.q_star, p.ops.M);
    write_convergence_csv(config.out / "convergence_dynamic.csv", rd);
    const auto k = first_effective_node(config.ocp.theta);
    log("dynamic (" + name + "): " + std::to_string(d.history.size() - 1) + " iterations (" + d.message + "), J = " +
        fmt(d.history.back().J) + ", " + fmt(secs) + " s");
    log("dynamic: |q(T) - q*| = " + fmt(rd.distance.back()) + " vs constant control " + fmt(rs.distance.back()));
    summary.add("dynamic_iterations", static_cast<double>(d.history.size() - 1));
    summary.add("dynamic_J", d.history.back().J);
    summary.add("dynamic_final_distance", rd.distance.back());
    summary.add("static_final_distance", rs.distance.back());
    summary.add("turnpike_u_first", d.turnpike[k].u_distance);
    summary.add("turnpike_u_last", d.turnpike.back().u_distance);
    summary.add("box_radius", d.box_radius);
    summary.add("projected_nodes", static_cast<double>(d.projected_nodes));
    summary.write(config.out / "summary.csv");
    write_manifest(config.out);
}

void cmd_particles(const RunConfig& config) {
    begin(config);
    const Problem p(config);
    Summary summary;
    const StaticSolution s = control_solution(config, p, summary);
    const auto& q0 = p.initial.front().second;
    const double dt = config.particles.dt.value_or(config.ocp.dt);
    const double T = config.particles.T.value_or(config.ocp.T);
    ThetaOptions opt = config.ocp.theta_options();
    opt.dt = dt;
    const auto traj = simulate(p.ops, q0, ControlSchedule(s.u_star), T, opt);
    const std::size_t N = traj.steps();
    const std::size_t K = std::min(config.particles.checkpoints, N);
    std::vector<std::size_t> checkpoints;
    for (std::size_t c = 1; c <= K; ++c) checkpoints.push_back((c * N) / K);

    const PointLocator locator(p.mesh);
    auto ens = sample_initial(q0, p.mesh, config.particles.count, config.seed);
    const VelocityField drift = drift_field(config.drift);
    const fs::path dir = config.out / "particles";
    fs::create_directories(dir);
    CsvWriter cmp(config.out / "comparison.csv",
                  {"step", "time", "l2_distance", "noise_floor", "ratio", "l2_distance_raw", "reflection_fallbacks"});
    auto snapshot = [&](std::size_t n) {
        {
            CsvWriter w(dir / ("ensemble_" + padded(n) + ".csv"), {"id", "x", "y"});
            for (std::size_t i = 0; i < ens.size(); ++i) {
                w.cell(i).cell(ens.positions[i].x).cell(ens.positions[i].y);
                w.end_row();
            }
        }
        const auto rho = empirical_density(ens, locator, p.ops);
        write_nodal_csv(dir / ("density_" + padded(n) + ".csv"), p.mesh, rho.values, "q");
        const auto& q = traj.states[n].values;
        const double dist = l2_distance(rho.values, deposition_mean(p.ops, q), p.ops.M);
        const double floor = deposition_noise_floor(p.mesh, p.ops, q, ens.size());
        cmp.cell(n).cell(traj.times[n]).cell(dist).cell(floor).cell(dist / floor).cell(l2_distance(rho.values, q, p.ops.M))
            .cell(ens.reflection_fallbacks);
        cmp.end_row();
        log("particles t = " + fmt(traj.times[n]) + ": L2 = " + fmt(dist) + ", noise floor = " + fmt(floor) +
            ", ratio = " + fmt(dist / floor));
        summary.add("ratio_step_" + std::to_string(n), dist / floor);
    };
    snapshot(0);
    std::size_t next = 0;
    for (std::size_t n = 1; n <= N; ++n) {
        step_particles(ens, locator, s.u_star, drift, config.ocp.mu, dt);
        if (next < checkpoints.size() && checkpoints[next] == n) {
            snapshot(n);
            ++next;
        }
    }
    summary.add("reflection_fallbacks", static_cast<double>(ens.reflection_fallbacks));
    summary.write(config.out / "summary.csv");
    write_manifest(config.out);
}

void cmd_certify(const RunConfig& config) {
    begin(config);
    const Problem p(config);
    Summary summary;
    const StaticSolution s = control_solution(config, p, summary);
    const auto traj = simulate(p.ops, p.initial.front().second, ControlSchedule(s.u_star), config.ocp.T,
                               config.ocp.theta_options());
    const auto report = certify(p.ops, s.u_star, &traj, &s.q_star);
    write_certificate(config.out / "certificate", report);
    write_convergence_csv(config.out / "convergence.csv", *report.convergence);
    log("certify: left kernel residual " + fmt(report.kernel.left_residual) +
        (report.kernel.dense ? ", kernel dim " + std::to_string(report.kernel.dimension) + ", gap ratio " +
                                   fmt(report.kernel.gap_ratio)
                             : std::string(", residual checks only")) +
        (report.min_symmetric_eigenvalue ? ", lambda_min " + fmt(*report.min_symmetric_eigenvalue) : std::string()) +
        ", Lyapunov monotone " + (report.convergence->lyapunov_monotone ? "yes" : "no"));
    if (report.kernel.ambiguous) log("certify warning: ambiguous kernel rank (gap ratio below 1e3)");
    write_manifest(config.out);
}

void cmd_testcase(const RunConfig& config) {
    if (config.testcase == 0) throw ConfigError({"testcase: config does not name a test case"});
    begin(config);
    const Problem p(config);
    Summary summary;
    save_mesh(p.mesh, config.out / "mesh.dat");
    write_quality(config.out / "mesh_quality.txt", p.mesh);
    write_nodal_csv(config.out / "target.csv", p.mesh, p.target.values, "z");
    for (const auto& [name, q0] : p.initial) write_nodal_csv(config.out / ("initial_" + name + ".csv"), p.mesh, q0.values, "q");

    const StaticSolution s = run_static(config, p, config.out / "static_solution", summary);
    for (const auto& [name, q0] : p.initial) {
        const auto rep = run_trajectory(config, p, ControlSchedule(s.u_star), q0, config.ocp.T, s.q_star,
                                        config.out / ("static_" + name), config.out / ("convergence_static_" + name + ".csv"),
                                        config.snapshot_every);
        log("constant control from " + name + ": |q(T) - q*| / |q(0) - q*| = " + fmt(rep.final_ratio) +
            ", Lyapunov monotone: " + (rep.lyapunov_monotone ? "yes" : "no"));
        summary.add("static_final_ratio_" + name, rep.final_ratio);
        summary.add("static_lyapunov_monotone_" + name, rep.lyapunov_monotone ? 1.0 : 0.0);
    }

    const auto& [name0, q00] = p.initial.front();
    if (config.drift != DriftKind::None) {
        const ControlField zero = ControlField::zeros(p.ops.size());
        const auto eq0 = solve_equilibrium(p.ops, zero);
        write_nodal_csv(config.out / "uncontrolled_equilibrium.csv", p.mesh, eq0.q.values, "q");
        const auto rep = run_trajectory(config, p, ControlSchedule(zero), q00, config.ocp.T, s.q_star,
                                        config.out / "uncontrolled", config.out / "convergence_uncontrolled.csv",
                                        config.snapshot_every);
        const auto own = simulate(p.ops, q00, ControlSchedule(zero), config.ocp.T, config.ocp.theta_options());
        const auto rown = convergence_report(own, eq0.q, p.ops.M);
        log("uncontrolled: |q(T) - q*| / |q(0) - q*| = " + fmt(rep.final_ratio) +
            ", |q(T) - q_eq(0)| / |q(0) - q_eq(0)| = " + fmt(rown.final_ratio));
        summary.add("uncontrolled_final_ratio_to_target_equilibrium", rep.final_ratio);
        summary.add("uncontrolled_final_ratio_to_own_equilibrium", rown.final_ratio);
        summary.add("uncontrolled_equilibrium_distance", l2_distance(eq0.q, s.q_star, p.ops.M));
    }

    const auto t0 = std::chrono::steady_clock::now();
    const DynamicSolution d = solve_dynamic_ocp(p.ops, q00, s, config.ocp);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_dynamic_solution(config.out / "dynamic_solution", p.mesh, p.ops, d, s.q_star);
    const auto rd = convergence_report(d.trajectory, s.q_star, p.ops.M);
    write_convergence_csv(config.out / "convergence_dynamic.csv", rd);
    const auto rs = convergence_report(simulate(p.ops, q00, ControlSchedule(s.u_star), config.ocp.T, config.ocp.theta_options()),
                                       s.q_star, p.ops.M);
    const auto k = first_effective_node(config.ocp.theta);
    log("dynamic from " + name0 + ": " + std::to_string(d.history.size() - 1) + " iterations (" + d.message + "), " +
        fmt(secs) + " s; |q(T) - q*| = " + fmt(rd.distance.back()) + " vs constant " + fmt(rs.distance.back()) +
        "; |u - u*| first " + fmt(d.turnpike[k].u_distance) + ", last " + fmt(d.turnpike.back().u_distance));
    summary.add("dynamic_iterations", static_cast<double>(d.history.size() - 1));
    summary.add("dynamic_final_distance", rd.distance.back());
    summary.add("static_final_distance", rs.distance.back());
    summary.add("dynamic_final_ratio", rd.final_ratio);
    summary.add("turnpike_u_first", d.turnpike[k].u_distance);
    summary.add("turnpike_u_last", d.turnpike.back().u_distance);

    std::optional<ConvergenceReport> long_run;
    if (config.long_horizon > 0.0) {
        const double T = long_horizon_end(config);
        long_run = run_trajectory(config, p, ControlSchedule(s.u_star), q00, T, s.q_star, {},
                                  config.out / "convergence_static_long.csv", 0);
        log("constant control over " + fmt(T) + " s: final ratio " + fmt(long_run->final_ratio));
        summary.add("long_horizon", T);
        summary.add("long_final_ratio", long_run->final_ratio);
    }
    if (config.threshold_fraction > 0.0) {
        const double threshold = config.threshold_fraction * rd.distance.front();
        const auto td = time_to_threshold(rd, threshold);
        const auto ts = time_to_threshold(long_run ? *long_run : rs, threshold);
        summary.add("threshold", threshold);
        summary.add("threshold_time_dynamic", td ? *td : -1.0);
        summary.add("threshold_time_static", ts ? *ts : -1.0);
        if (td && ts && *td > 0.0) {
            summary.add("speedup", *ts / *td);
            log("time to reach " + fmt(config.threshold_fraction) + " of the initial distance: dynamic " + fmt(*td) +
                " s, constant " + fmt(*ts) + " s (factor " + fmt(*ts / *td) + ")");
        }
    }

    const auto traj = simulate(p.ops, q00, ControlSchedule(s.u_star), config.ocp.T, config.ocp.theta_options());
    const auto report = certify(p.ops, s.u_star, &traj, &s.q_star);
    write_certificate(config.out / "certificate", report);
    summary.add("kernel_left_residual", report.kernel.left_residual);
    if (report.kernel.dense) summary.add("kernel_gap_ratio", report.kernel.gap_ratio);
    if (report.min_symmetric_eigenvalue) summary.add("min_symmetric_eigenvalue", *report.min_symmetric_eigenvalue);

    summary.write(config.out / "summary.csv");
    write_manifest(config.out);
}

int run(int argc, char** argv) {
    CLI::App app{"swarmctl: density control of robotic swarms on triangulated domains"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    bool fine_scale = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory (overrides the config)");
    app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_flag("--fine-scale", fine_scale, "run test cases on the finer mesh");

    auto* mesh = app.add_subcommand("mesh", "mesh generation and checking");
    mesh->require_subcommand(1);
    auto* mesh_gen = mesh->add_subcommand("gen", "generate a mesh from the config's mesh block");
    auto* mesh_check = mesh->add_subcommand("check", "validate a mesh file and report its quality");
    std::string mesh_file;
    mesh_check->add_option("file", mesh_file, "mesh file")->required();
    auto* stat = app.add_subcommand("static", "solve the static optimal control problem");
    auto* sim = app.add_subcommand("simulate", "simulate the density under a constant control");
    auto* dyn = app.add_subcommand("dynamic", "solve the dynamic problem warm-started from the static one");
    auto* part = app.add_subcommand("particles", "Euler-Maruyama particles vs the mean-field density");
    std::optional<std::size_t> count;
    part->add_option("--count", count, "number of particles (overrides the config)");
    auto* cert = app.add_subcommand("certify", "kernel, spectral and Lyapunov certificates for a control");
    auto* tc = app.add_subcommand("testcase", "run a preset scenario end to end");
    int tc_id = 0;
    tc->add_option("id", tc_id, "1, 2 or 3 (omit to replay a config.echo given by --config)")->check(CLI::Range(1, 3));

    // Options after the subcommand belong to the parent as well.
    for (auto* sub : {mesh_gen, mesh_check, stat, sim, dyn, part, cert, tc}) sub->fallthrough();
    mesh->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "ERROR kind=usage message=\"" << e.what() << "\"\n";
        return 2;
    }

    auto quoted = [](std::string s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\') out += '\\';
            out += c == '\n' ? ' ' : c;
        }
        return out;
    };

    try {
        if (mesh_check->parsed()) {
            cmd_mesh_check(mesh_file, std::cout);
            return 0;
        }
        RunConfig config;
        if (tc->parsed()) {
            if (!config_path.empty()) {
                config = load_config(config_path);
                if (tc_id != 0 && tc_id != config.testcase)
                    throw ConfigError({"testcase " + std::to_string(tc_id) + " does not match the config (" +
                                       std::to_string(config.testcase) + ")"});
            } else if (tc_id == 0) {
                throw ConfigError({"testcase needs an id or --config"});
            } else {
                config = testcase_config(tc_id, fine_scale);
            }
        } else {
            if (config_path.empty()) throw ConfigError({"--config is required for this command"});
            config = load_config(config_path);
        }
        if (!out_dir.empty()) config.out = out_dir;
        if (seed) config.seed = *seed;
        if (count) config.particles.count = *count;

        if (mesh_gen->parsed()) cmd_mesh_gen(config);
        else if (stat->parsed()) cmd_static(config);
        else if (sim->parsed()) cmd_simulate(config);
        else if (dyn->parsed()) cmd_dynamic(config);
        else if (part->parsed()) cmd_particles(config);
        else if (cert->parsed()) cmd_certify(config);
        else if (tc->parsed()) cmd_testcase(config);
        return 0;
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) std::cerr << "ERROR kind=config message=\"" << quoted(p) << "\"\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "ERROR kind=" << e.kind() << " message=\"" << quoted(e.what()) << "\"\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "ERROR kind=internal message=\"" << quoted(e.what()) << "\"\n";
        return 1;
    }
}

}  // namespace swarmctl::cli
