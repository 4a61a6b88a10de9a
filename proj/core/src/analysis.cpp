#include "swarmctl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/SVD>

#include "swarmctl/error.hpp"
#include "swarmctl/io.hpp"
#include "swarmctl/linalg.hpp"

namespace swarmctl {

KernelCertificate certify_kernel(const FemOperators& ops, const ControlField& u, std::size_t dense_limit) {
    const SparseMatrix L = state_matrix(ops, u);
    const Eigen::Index n = L.rows();
    KernelCertificate c;
    c.norm_L = norm_inf(L);
    const Vector ones = Vector::Ones(n);
    const double scale = c.norm_L > 0.0 ? c.norm_L : 1.0;
    c.left_residual = (L.transpose() * ones).cwiseAbs().maxCoeff() / scale;
    c.transpose_residual = c.left_residual;  // 1^T L and L^T 1 are the same vector
    if (static_cast<std::size_t>(n) > dense_limit || n < 2) return c;

    c.dense = true;
    const Eigen::MatrixXd dense = Eigen::MatrixXd(L);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();  // descending
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(4, n); ++k) c.smallest_singular_values.push_back(s[n - 1 - k]);
    const double smax = s[0];
    c.dimension = 0;
    for (Eigen::Index k = 0; k < n; ++k)
        if (s[k] <= 1e-10 * smax) ++c.dimension;
    c.gap_ratio = s[n - 1] > 0.0 ? s[n - 2] / s[n - 1] : std::numeric_limits<double>::infinity();
    c.ambiguous = c.gap_ratio < 1e3;
    c.v = svd.matrixV().col(n - 1);
    if (c.v.sum() < 0.0) c.v = -c.v;
    c.v_min = c.v.minCoeff();
    return c;
}

Eigen::MatrixXd zero_mean_basis(const Vector& F) {
    const Eigen::Index n = F.size();
    if (n < 2) throw DimensionError("zero-mean basis needs at least two nodes");
    if (F.minCoeff() <= 0.0) throw DimensionError("lumped mass entries must be positive");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n - 1);
    for (Eigen::Index k = 1; k < n; ++k) {
        B(0, k - 1) = 1.0;
        B(k, k - 1) = -F[0] / F[k];
    }
    for (Eigen::Index j = 0; j < n - 1; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index i = 0; i < j; ++i) B.col(j) -= B.col(i).dot(B.col(j)) * B.col(i);
        B.col(j).normalize();
    }
    return B;
}

std::optional<double> certify_spectral_positivity(const FemOperators& ops, const ControlField& u,
                                                  std::size_t dense_limit) {
    if (ops.size() > static_cast<Eigen::Index>(dense_limit)) return std::nullopt;
    const Eigen::MatrixXd B = zero_mean_basis(ops.F);
    const Eigen::MatrixXd LB = state_matrix(ops, u) * B;
    const Eigen::MatrixXd S = B.transpose() * LB;
    const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()[0];
}

double l2_distance(const Vector& a, const Vector& b, const SparseMatrix& M) {
    if (a.size() != b.size() || a.size() != M.rows()) throw DimensionError("l2_distance: size mismatch");
    const Vector e = a - b;
    return std::sqrt(std::max(0.0, e.dot(M * e)));
}

double l2_distance(const DensityField& a, const DensityField& b, const SparseMatrix& M) {
    return l2_distance(a.values, b.values, M);
}

ConvergenceReport convergence_report(const Trajectory& trajectory, const DensityField& reference, const SparseMatrix& M) {
    ConvergenceReport r;
    r.times = trajectory.times;
    for (const auto& q : trajectory.states) {
        const double d = l2_distance(q, reference, M);
        r.distance.push_back(d);
        r.lyapunov.push_back(0.5 * d * d);
    }
    if (r.distance.empty()) return r;
    r.strictly_decreasing = true;
    r.lyapunov_monotone = true;
    r.worst_increase = -std::numeric_limits<double>::infinity();
    const double slack = 1e-12 * r.lyapunov.front();
    for (std::size_t n = 0; n + 1 < r.distance.size(); ++n) {
        if (!(r.distance[n + 1] < r.distance[n])) r.strictly_decreasing = false;
        const double inc = r.lyapunov[n + 1] - r.lyapunov[n];
        r.worst_increase = std::max(r.worst_increase, inc);
        if (inc > slack) r.lyapunov_monotone = false;
    }
    if (r.distance.size() == 1) r.worst_increase = 0.0;
    r.final_ratio = r.distance.front() > 0.0 ? r.distance.back() / r.distance.front() : 0.0;
    return r;
}

std::optional<double> time_to_threshold(const ConvergenceReport& report, double threshold) {
    for (std::size_t n = 0; n < report.distance.size(); ++n) {
        if (report.distance[n] > threshold) continue;
        if (n == 0) return report.times[0];
        const double d0 = report.distance[n - 1], d1 = report.distance[n];
        const double s = (d0 - threshold) / (d0 - d1);
        return report.times[n - 1] + s * (report.times[n] - report.times[n - 1]);
    }
    return std::nullopt;
}

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceReport& report) {
    CsvWriter w(path, {"time", "l2_distance", "lyapunov"});
    for (std::size_t n = 0; n < report.times.size(); ++n) {
        w.cell(report.times[n]).cell(report.distance[n]).cell(report.lyapunov[n]);
        w.end_row();
    }
}

std::optional<bool> CertificateReport::lyapunov_monotone() const {
    if (!convergence) return std::nullopt;
    return convergence->lyapunov_monotone;
}

CertificateReport certify(const FemOperators& ops, const ControlField& u, const Trajectory* trajectory,
                          const DensityField* reference, std::size_t dense_limit) {
    CertificateReport r;
    r.kernel = certify_kernel(ops, u, dense_limit);
    r.min_symmetric_eigenvalue = certify_spectral_positivity(ops, u, dense_limit);
    if (trajectory && reference) r.convergence = convergence_report(*trajectory, *reference, ops.M);
    return r;
}

void write_certificate(const std::filesystem::path& dir, const CertificateReport& report) {
    const auto& k = report.kernel;
    struct Row {
        std::string check;
        double value;
        std::string pass;
    };
    std::vector<Row> rows;
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    rows.push_back({"left_kernel_residual", k.left_residual, flag(k.left_residual < 1e-12)});
    rows.push_back({"transpose_kernel_residual", k.transpose_residual, flag(k.transpose_residual < 1e-12)});
    rows.push_back({"norm_L_inf", k.norm_L, ""});
    if (k.dense) {
        rows.push_back({"kernel_dim_state", static_cast<double>(k.dimension), flag(k.dimension == 1)});
        rows.push_back({"singular_gap_ratio", k.gap_ratio, flag(k.gap_ratio > 1e6)});
        rows.push_back({"kernel_vector_min", k.v_min, flag(k.v_min > 0.0)});
    }
    if (report.min_symmetric_eigenvalue)
        rows.push_back({"min_symmetric_eigenvalue_on_zero_mean", *report.min_symmetric_eigenvalue,
                        flag(*report.min_symmetric_eigenvalue > 0.0)});
    if (report.convergence) {
        const auto& c = *report.convergence;
        rows.push_back({"lyapunov_worst_increase", c.worst_increase, flag(c.lyapunov_monotone)});
        rows.push_back({"l2_final_ratio", c.final_ratio, ""});
        rows.push_back({"l2_strictly_decreasing", c.strictly_decreasing ? 1.0 : 0.0, flag(c.strictly_decreasing)});
    }

    std::filesystem::create_directories(dir);
    {
        CsvWriter w(dir / "certificate.csv", {"check", "value", "pass"});
        for (const auto& r : rows) {
            w.cell(r.check).cell(r.value).cell(r.pass);
            w.end_row();
        }
    }
    std::ofstream txt(dir / "certificate.txt");
    if (!txt) throw Error("cannot open " + (dir / "certificate.txt").string());
    txt << "State kernel\n";
    txt << "  ||1^T L||_inf / ||L||_inf = " << format_double(k.left_residual) << "\n";
    txt << "  ||L||_inf = " << format_double(k.norm_L) << "\n";
    if (k.dense) {
        txt << "  numerical kernel dimension = " << k.dimension << "\n";
        txt << "  singular value gap sigma_{N-1}/sigma_N = " << format_double(k.gap_ratio)
            << (k.ambiguous ? "  (AMBIGUOUS: below 1e3)" : "") << "\n";
        txt << "  smallest singular values:";
        for (double s : k.smallest_singular_values) txt << " " << format_double(s);
        txt << "\n  min entry of normalized kernel vector = " << format_double(k.v_min) << "\n";
    } else {
        txt << "  mesh above dense limit: residual checks only\n";
    }
    if (report.min_symmetric_eigenvalue) {
        txt << "Zero-mean subspace\n";
        txt << "  lambda_min(sym(B^T L B)) = " << format_double(*report.min_symmetric_eigenvalue)
            << (*report.min_symmetric_eigenvalue > 0.0 ? "  (positive: exponential decay certified)"
                                                       : "  (not positive: no certificate from the symmetric part)")
            << "\n";
    }
    if (report.convergence) {
        const auto& c = *report.convergence;
        txt << "Trajectory\n";
        txt << "  steps = " << (c.distance.empty() ? 0 : c.distance.size() - 1) << "\n";
        txt << "  Lyapunov monotone (slack 1e-12 l_0) = " << (c.lyapunov_monotone ? "yes" : "no")
            << ", worst per-step change = " << format_double(c.worst_increase) << "\n";
        txt << "  L2 distance strictly decreasing = " << (c.strictly_decreasing ? "yes" : "no") << "\n";
        txt << "  final / initial L2 distance = " << format_double(c.final_ratio) << "\n";
    }
}

}  // namespace swarmctl
