#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swarmctl/state.hpp"

namespace swarmctl {

/// Meshes up to this many nodes take the dense (SVD / eigenvalue) paths.
inline constexpr std::size_t kDenseLimit = 2000;

struct KernelCertificate {
    bool dense = false;              // false: residual-only checks
    int dimension = -1;              // numerical kernel dimension (-1 if not computed)
    double gap_ratio = 0.0;          // sigma_{N-1} / sigma_N
    bool ambiguous = false;          // gap_ratio < 1e3
    Vector v;                        // kernel vector, sign-normalized, unit Euclidean norm
    double v_min = 0.0;              // smallest entry of v
    double left_residual = 0.0;      // ||1^T L||_inf / ||L||_inf
    double transpose_residual = 0.0; // ||L^T 1||_inf / ||L||_inf
    double norm_L = 0.0;             // ||L||_inf
    std::vector<double> smallest_singular_values;  // ascending, at most 4
};

KernelCertificate certify_kernel(const FemOperators& ops, const ControlField& u, std::size_t dense_limit = kDenseLimit);

/// Euclidean-orthonormal basis (n x (n-1)) of {w : F^T w = 0}, by modified
/// Gram-Schmidt (two passes) on e_1 - (F_1/F_k) e_k, k = 2..n.
Eigen::MatrixXd zero_mean_basis(const Vector& F);

/// lambda_min of the symmetric part of B^T L(u) B. Returns nullopt above the
/// dense limit.
std::optional<double> certify_spectral_positivity(const FemOperators& ops, const ControlField& u,
                                                  std::size_t dense_limit = kDenseLimit);

/// sqrt((a - b)^T M (a - b)).
double l2_distance(const Vector& a, const Vector& b, const SparseMatrix& M);
double l2_distance(const DensityField& a, const DensityField& b, const SparseMatrix& M);

struct ConvergenceReport {
    std::vector<double> times;
    std::vector<double> distance;   // ||q_n - ref||_M
    std::vector<double> lyapunov;   // 0.5 ||q_n - ref||_M^2
    bool strictly_decreasing = false;  // distance_{n+1} < distance_n for every step
    bool lyapunov_monotone = false;    // l_{n+1} <= l_n + 1e-12 l_0 for every step
    double worst_increase = 0.0;       // max_n (l_{n+1} - l_n), may be negative
    double final_ratio = 0.0;          // distance_N / distance_0
};

ConvergenceReport convergence_report(const Trajectory& trajectory, const DensityField& reference, const SparseMatrix& M);

/// First time at which the distance drops to `threshold`, linearly
/// interpolated between nodes; nullopt if it never does.
std::optional<double> time_to_threshold(const ConvergenceReport& report, double threshold);

/// CSV with columns time,l2_distance,lyapunov.
void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report);

struct CertificateReport {
    KernelCertificate kernel;
    std::optional<double> min_symmetric_eigenvalue;
    std::optional<ConvergenceReport> convergence;

    int kernel_dim_state() const { return kernel.dimension; }
    double left_kernel_residual() const { return kernel.left_residual; }
    std::optional<bool> lyapunov_monotone() const;
};

CertificateReport certify(const FemOperators& ops, const ControlField& u, const Trajectory* trajectory = nullptr,
                          const DensityField* reference = nullptr, std::size_t dense_limit = kDenseLimit);

/// certificate.csv (check,value,pass) and certificate.txt in `dir`.
void write_certificate(const std::filesystem::path& dir, const CertificateReport& report);

}  // namespace swarmctl
