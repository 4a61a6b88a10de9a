#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "swarmctl/fem.hpp"

namespace swarmctl {

/// Uniform background grid over the mesh bounding box for point location.
class PointLocator {
public:
    explicit PointLocator(const Mesh& mesh);

    /// Triangle containing p (boundary points included), or -1 if outside.
    int locate(const Point& p) const;

    /// Barycentric coordinates of p with respect to triangle t.
    std::array<double, 3> barycentric(int t, const Point& p) const;

    const Mesh& mesh() const { return mesh_; }

private:
    const Mesh& mesh_;
    double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> cells_;
};

struct ParticleEnsemble {
    std::vector<Point> positions;
    std::vector<int> triangle;   // containing triangle of each particle
    std::uint64_t seed = 0;
    std::mt19937_64 rng;         // single sequential stream: deterministic for a given seed
    double time = 0.0;
    std::size_t reflection_fallbacks = 0;  // particles projected after the reflection cap

    std::size_t size() const { return positions.size(); }
};

/// Draws N positions from the linear nodal density: triangle chosen with
/// probability proportional to its integrated density, then a uniform point
/// accepted with probability proportional to the interpolated density.
/// Negative nodal values are treated as zero.
ParticleEnsemble sample_initial(const DensityField& density, const Mesh& mesh, std::size_t count, std::uint64_t seed);

struct StepStats {
    std::size_t reflections = 0;
    std::size_t fallbacks = 0;
};

/// One Euler-Maruyama step X += (u(X) + b(X)) dt + sqrt(2 mu dt) xi, with u
/// interpolated in P1 and boundary crossings reflected specularly across the
/// crossed edge (at most 10 reflections, then the particle stops on the
/// boundary, nudged inside, and the event is counted).
StepStats step_particles(ParticleEnsemble& ensemble, const PointLocator& locator, const ControlField& u,
                         const VelocityField& drift, double mu, double dt);

/// Lumped deposition: each particle spreads 1/N over its triangle's vertices
/// by barycentric weights; the result is divided by the lumped mass so that
/// F^T rho = 1.
DensityField empirical_density(const ParticleEnsemble& ensemble, const PointLocator& locator, const FemOperators& ops);

/// Expected value of empirical_density for particles distributed by q:
/// M_lumped^{-1} M q.
Vector deposition_mean(const FemOperators& ops, const Vector& q);

/// sqrt(E ||rho - E rho||_M^2) for N independent particles with density q,
/// computed exactly from the P1 triple products.
double deposition_noise_floor(const Mesh& mesh, const FemOperators& ops, const Vector& q, std::size_t count);

}  // namespace swarmctl
