#include <random>

#include <benchmark/benchmark.h>

#include "swarmctl/ocp_static.hpp"
#include "swarmctl/presets.hpp"
#include "swarmctl/state.hpp"

using namespace swarmctl;

namespace {

// Circle-hole mesh whose node count grows roughly like 1/h^2.
Mesh bench_mesh(double h) {
    const Hole hole = Circle{{0.0, 0.0}, 0.3};
    return generate_rect_mesh({-1, -1, 1, 1}, h, std::span<const Hole>(&hole, 1));
}

double mesh_size(const benchmark::State& state) { return 1.0 / static_cast<double>(state.range(0)); }

ControlField random_control(Eigen::Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ControlField u = ControlField::zeros(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        u.ux[i] = g(rng);
        u.uy[i] = g(rng);
    }
    return u;
}

void BM_Assemble(benchmark::State& state) {
    const Mesh mesh = bench_mesh(mesh_size(state));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(mesh, 1.0));
    state.counters["nodes"] = static_cast<double>(mesh.num_vertices());
}

void BM_Equilibrium(benchmark::State& state) {
    const Mesh mesh = bench_mesh(mesh_size(state));
    const auto ops = assemble_operators(mesh, 1.0);
    const auto u = random_control(ops.size(), 1);
    for (auto _ : state) benchmark::DoNotOptimize(solve_equilibrium(ops, u));
    state.counters["nodes"] = static_cast<double>(mesh.num_vertices());
}

void BM_ReducedGradient(benchmark::State& state) {
    const Mesh mesh = bench_mesh(mesh_size(state));
    const auto ops = assemble_operators(mesh, 1.0);
    const auto z = normalized_density(nodal_indicator(mesh, {Rect{0.3, -0.9, 0.9, 0.9}}), ops.F);
    const auto u = random_control(ops.size(), 2);
    const OcpConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(reduced_gradient(ops, u, z, cfg));
    state.counters["nodes"] = static_cast<double>(mesh.num_vertices());
}

void BM_ThetaStep(benchmark::State& state) {
    const Mesh mesh = bench_mesh(mesh_size(state));
    const auto ops = assemble_operators(mesh, 1.0);
    const auto u0 = random_control(ops.size(), 3), u1 = random_control(ops.size(), 4);
    const auto q = normalized_density(nodal_gaussian(mesh, {-0.5, -0.5}, 0.2), ops.F);
    for (auto _ : state) benchmark::DoNotOptimize(step_theta(ops, q, u0, u1, {0.03, 1.0, true}));
    state.counters["nodes"] = static_cast<double>(mesh.num_vertices());
}

}  // namespace

// Arguments are 1/h.
BENCHMARK(BM_Assemble)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Equilibrium)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReducedGradient)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThetaStep)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
