#include "swarmctl/particles.hpp"

#include <algorithm>
#include <cmath>

#include "swarmctl/error.hpp"

namespace swarmctl {

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
    const auto& V = mesh.vertices();
    double x1 = V[0].x, y1 = V[0].y;
    x0_ = x1;
    y0_ = y1;
    for (const auto& p : V) {
        x0_ = std::min(x0_, p.x);
        y0_ = std::min(y0_, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
    const double w = std::max(x1 - x0_, 1e-300), h = std::max(y1 - y0_, 1e-300);
    const double target = std::sqrt(static_cast<double>(mesh.num_triangles()));
    cell_ = std::max(w, h) / std::max(1.0, target);
    nx_ = std::max(1, static_cast<int>(std::ceil(w / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(h / cell_)));
    cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        double bx0 = V[tri[0]].x, bx1 = bx0, by0 = V[tri[0]].y, by1 = by0;
        for (int k = 1; k < 3; ++k) {
            bx0 = std::min(bx0, V[tri[k]].x);
            bx1 = std::max(bx1, V[tri[k]].x);
            by0 = std::min(by0, V[tri[k]].y);
            by1 = std::max(by1, V[tri[k]].y);
        }
        const int i0 = std::clamp(static_cast<int>((bx0 - x0_) / cell_), 0, nx_ - 1);
        const int i1 = std::clamp(static_cast<int>((bx1 - x0_) / cell_), 0, nx_ - 1);
        const int j0 = std::clamp(static_cast<int>((by0 - y0_) / cell_), 0, ny_ - 1);
        const int j1 = std::clamp(static_cast<int>((by1 - y0_) / cell_), 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) cells_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
    }
}

std::array<double, 3> PointLocator::barycentric(int t, const Point& p) const {
    const auto& tri = mesh_.triangles()[t];
    const auto& V = mesh_.vertices();
    const double area = mesh_.triangle_area(t);
    return {signed_area(p, V[tri[1]], V[tri[2]]) / area, signed_area(V[tri[0]], p, V[tri[2]]) / area,
            signed_area(V[tri[0]], V[tri[1]], p) / area};
}

int PointLocator::locate(const Point& p) const {
    const int i = static_cast<int>(std::floor((p.x - x0_) / cell_));
    const int j = static_cast<int>(std::floor((p.y - y0_) / cell_));
    if (i < -1 || j < -1 || i > nx_ || j > ny_) return -1;
    int best = -1;
    double best_min = -1e-12;
    for (int jj = std::max(0, j - 1); jj <= std::min(ny_ - 1, j + 1); ++jj)
        for (int ii = std::max(0, i - 1); ii <= std::min(nx_ - 1, i + 1); ++ii) {
            // Neighboring cells only matter for points on cell borders.
            if ((ii != std::clamp(i, 0, nx_ - 1) || jj != std::clamp(j, 0, ny_ - 1)) && best >= 0) continue;
            for (int t : cells_[static_cast<std::size_t>(jj) * nx_ + ii]) {
                const auto b = barycentric(t, p);
                const double m = std::min({b[0], b[1], b[2]});
                if (m >= 0.0) return t;
                if (m > best_min) {
                    best_min = m;
                    best = t;
                }
            }
        }
    return best;
}

ParticleEnsemble sample_initial(const DensityField& density, const Mesh& mesh, std::size_t count, std::uint64_t seed) {
    if (static_cast<std::size_t>(density.values.size()) != mesh.num_vertices())
        throw DimensionError("density size does not match the mesh");
    const auto& T = mesh.triangles();
    const auto& V = mesh.vertices();
    auto val = [&](int v) { return std::max(0.0, density.values[v]); };
    std::vector<double> weight(T.size());
    double total = 0.0;
    for (std::size_t t = 0; t < T.size(); ++t) {
        weight[t] = mesh.triangle_area(t) * (val(T[t][0]) + val(T[t][1]) + val(T[t][2])) / 3.0;
        total += weight[t];
    }
    if (!(total > 0.0)) throw GeometryError("cannot sample particles from a density with no positive mass");

    ParticleEnsemble ens;
    ens.seed = seed;
    ens.rng.seed(seed);
    ens.positions.reserve(count);
    ens.triangle.reserve(count);
    std::discrete_distribution<std::size_t> pick(weight.begin(), weight.end());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t p = 0; p < count; ++p) {
        const auto t = pick(ens.rng);
        const auto& tri = T[t];
        const double vmax = std::max({val(tri[0]), val(tri[1]), val(tri[2])});
        for (;;) {
            const double r1 = std::sqrt(unif(ens.rng)), r2 = unif(ens.rng);
            const double l0 = 1.0 - r1, l1 = r1 * (1.0 - r2), l2 = r1 * r2;
            const double f = l0 * val(tri[0]) + l1 * val(tri[1]) + l2 * val(tri[2]);
            if (unif(ens.rng) * vmax <= f) {
                ens.positions.push_back({l0 * V[tri[0]].x + l1 * V[tri[1]].x + l2 * V[tri[2]].x,
                                         l0 * V[tri[0]].y + l1 * V[tri[1]].y + l2 * V[tri[2]].y});
                ens.triangle.push_back(static_cast<int>(t));
                break;
            }
        }
    }
    return ens;
}

namespace {

constexpr int kMaxReflections = 10;
constexpr int kMaxWalk = 100000;

// Moves a particle from `pos` in triangle `tri` by `disp`, walking across
// interior edges and reflecting across boundary edges.
void move_particle(const Mesh& mesh, const PointLocator& locator, Point& pos, int& tri, double dx, double dy,
                   StepStats& stats) {
    const auto& V = mesh.vertices();
    const auto& nb = mesh.neighbors();
    int reflections = 0;
    for (int guard = 0; guard < kMaxWalk; ++guard) {
        const auto& t = mesh.triangles()[tri];
        const auto g = p1_gradients(mesh, static_cast<std::size_t>(tri));
        const auto lam = locator.barycentric(tri, pos);
        double s_exit = 1.0;
        int edge = -1;
        for (int a = 0; a < 3; ++a) {
            const double slope = g[a][0] * dx + g[a][1] * dy;
            if (slope < 0.0) {
                const double s = std::max(0.0, lam[a]) / -slope;
                if (s < s_exit) {
                    s_exit = s;
                    edge = a;
                }
            }
        }
        if (edge < 0) {
            pos.x += dx;
            pos.y += dy;
            return;
        }
        // Advance to the exit point on the edge opposite local vertex `edge`.
        pos.x += s_exit * dx;
        pos.y += s_exit * dy;
        dx *= 1.0 - s_exit;
        dy *= 1.0 - s_exit;
        const int next = nb[tri][edge];
        if (next >= 0) {
            tri = next;
            continue;
        }
        if (reflections == kMaxReflections) {
            // Stop on the boundary, nudged toward the centroid.
            const Point c = mesh.centroid(static_cast<std::size_t>(tri));
            pos.x += 1e-9 * (c.x - pos.x);
            pos.y += 1e-9 * (c.y - pos.y);
            ++stats.fallbacks;
            return;
        }
        const auto& pa = V[t[(edge + 1) % 3]];
        const auto& pb = V[t[(edge + 2) % 3]];
        double tx = pb.x - pa.x, ty = pb.y - pa.y;
        const double len = std::hypot(tx, ty);
        tx /= len;
        ty /= len;
        const double along = dx * tx + dy * ty;
        dx = 2.0 * along * tx - dx;
        dy = 2.0 * along * ty - dy;
        ++reflections;
        ++stats.reflections;
    }
    // Walk did not terminate (degenerate geometry); relocate from scratch.
    const int t = locator.locate(pos);
    if (t < 0) throw GeometryError("particle left the mesh");
    tri = t;
    ++stats.fallbacks;
}

}  // namespace

StepStats step_particles(ParticleEnsemble& ensemble, const PointLocator& locator, const ControlField& u,
                         const VelocityField& drift, double mu, double dt) {
    if (!(dt > 0.0)) throw DimensionError("particle time step must be positive");
    if (!(mu >= 0.0)) throw DimensionError("diffusion coefficient must be nonnegative");
    const Mesh& mesh = locator.mesh();
    if (static_cast<std::size_t>(u.ux.size()) != mesh.num_vertices()) throw DimensionError("control size does not match the mesh");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = std::sqrt(2.0 * mu * dt);
    StepStats stats;
    for (std::size_t p = 0; p < ensemble.size(); ++p) {
        Point& x = ensemble.positions[p];
        int& t = ensemble.triangle[p];
        const auto lam = locator.barycentric(t, x);
        const auto& tri = mesh.triangles()[t];
        double vx = lam[0] * u.ux[tri[0]] + lam[1] * u.ux[tri[1]] + lam[2] * u.ux[tri[2]];
        double vy = lam[0] * u.uy[tri[0]] + lam[1] * u.uy[tri[1]] + lam[2] * u.uy[tri[2]];
        if (drift) {
            const auto b = drift(x.x, x.y);
            vx += b[0];
            vy += b[1];
        }
        if (!std::isfinite(vx) || !std::isfinite(vy))
            throw GeometryError("non-finite velocity at particle " + std::to_string(p));
        const double xi = normal(ensemble.rng);
        const double eta = normal(ensemble.rng);
        move_particle(mesh, locator, x, t, vx * dt + sigma * xi, vy * dt + sigma * eta, stats);
    }
    ensemble.time += dt;
    ensemble.reflection_fallbacks += stats.fallbacks;
    return stats;
}

DensityField empirical_density(const ParticleEnsemble& ensemble, const PointLocator& locator, const FemOperators& ops) {
    if (ensemble.size() == 0) throw DimensionError("empirical density of an empty ensemble");
    const Mesh& mesh = locator.mesh();
    Vector dep = Vector::Zero(ops.size());
    const double w = 1.0 / static_cast<double>(ensemble.size());
    for (std::size_t p = 0; p < ensemble.size(); ++p) {
        const int t = ensemble.triangle[p];
        auto lam = locator.barycentric(t, ensemble.positions[p]);
        if (std::min({lam[0], lam[1], lam[2]}) < -1e-9) throw GeometryError("particle " + std::to_string(p) + " is outside its triangle");
        for (auto& l : lam) l = std::clamp(l, 0.0, 1.0);
        const double s = lam[0] + lam[1] + lam[2];
        const auto& tri = mesh.triangles()[t];
        for (int a = 0; a < 3; ++a) dep[tri[a]] += w * lam[a] / s;
    }
    return DensityField(dep.cwiseQuotient(ops.M_lumped), ops.F);
}

Vector deposition_mean(const FemOperators& ops, const Vector& q) { return (ops.M * q).cwiseQuotient(ops.M_lumped); }

double deposition_noise_floor(const Mesh& mesh, const FemOperators& ops, const Vector& q, std::size_t count) {
    if (count == 0) throw DimensionError("noise floor needs at least one particle");
    // E[phi_i phi_j] = sum_k q_k int phi_i phi_j phi_k, accumulated on the mass-matrix pattern.
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        const double area = mesh.triangle_area(t);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double s = 0.0;
                for (int c = 0; c < 3; ++c) {
                    double integral;
                    if (a == b && b == c) integral = area / 10.0;
                    else if (a == b || b == c || a == c) integral = area / 30.0;
                    else integral = area / 60.0;
                    s += integral * q[tri[c]];
                }
                trip.emplace_back(tri[a], tri[b], s);
            }
    }
    SparseMatrix E2(ops.size(), ops.size());
    E2.setFromTriplets(trip.begin(), trip.end());
    const Vector m1 = ops.M * q;
    const double N = static_cast<double>(count);
    // E||rho - E rho||_M^2 = sum_ij M_ij (E2_ij - m1_i m1_j) / (N F_i F_j)
    double total = 0.0;
    for (int k = 0; k < E2.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(E2, k); it; ++it) {
            const auto i = it.row(), j = it.col();
            total += ops.M.coeff(i, j) * (it.value() - m1[i] * m1[j]) / (N * ops.M_lumped[i] * ops.M_lumped[j]);
        }
    // Off-pattern pairs (i, j not sharing a triangle) have M_ij = 0 and do not contribute.
    return std::sqrt(std::max(0.0, total));
}

}  // namespace swarmctl
