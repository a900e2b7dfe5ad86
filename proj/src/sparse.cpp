#include "spars/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace spars {

namespace {

// Singular values below this fraction of s_max count as exact zeros.
constexpr double kRelativeZeroTol = 1e-12;

Vector clean_singular_values(const Vector& sv) {
    Vector out = sv;
    if (out.size() == 0) return out;
    const double cutoff = kRelativeZeroTol * out[0];
    for (Eigen::Index i = 0; i < out.size(); ++i)
        if (out[i] <= cutoff) out[i] = 0.0;
    return out;
}

// Least-squares coefficients of Y's column against the support columns of A.
Vector solve_on_support(const Matrix& A, const std::vector<Eigen::Index>& support,
                        const Vector& y) {
    Matrix sub(A.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i)
        sub.col(static_cast<Eigen::Index>(i)) = A.col(support[i]);
    return sub.colPivHouseholderQr().solve(y);
}

}  // namespace

ThresholdedRank thresholded_rank(const Matrix& A, double delta) {
    if (A.size() == 0)
        throw ShapeError("thresholded_rank: empty matrix");
    if (delta <= 0.0)
        throw RangeError("thresholded_rank: delta must be positive");
    Eigen::JacobiSVD<Matrix> svd(A);
    ThresholdedRank result;
    result.delta = delta;
    result.singular_values = clean_singular_values(svd.singularValues());
    result.rank = (result.singular_values.array() > delta).count();
    return result;
}

SparseSolveReport sparse_lsq(const Matrix& A, const Matrix& Y, double delta,
                             std::optional<Eigen::Index> max_nnz_per_column) {
    if (A.rows() != Y.rows())
        throw ShapeError("sparse_lsq: A has " + std::to_string(A.rows()) + " rows but Y has " +
                         std::to_string(Y.rows()));
    if (delta <= 0.0)
        throw RangeError("sparse_lsq: delta must be positive");

    const ThresholdedRank rk = thresholded_rank(A, delta);
    if (rk.rank == 0)
        throw RankDeficiencyError("sparse_lsq: rk_delta(A) = 0 at delta = " +
                                  std::to_string(delta));

    const Eigen::Index n = A.cols();
    const Eigen::Index p = Y.cols();
    Eigen::Index support_cap = std::min(rk.rank, n);
    if (max_nnz_per_column)
        support_cap = std::min(support_cap, std::max<Eigen::Index>(*max_nnz_per_column, 0));

    const Vector col_norms = A.colwise().norm();

    SparseSolveReport report;
    report.delta = delta;
    report.solution = Matrix::Zero(n, p);

    std::vector<bool> selected_any(static_cast<std::size_t>(n), false);

    for (Eigen::Index j = 0; j < p; ++j) {
        const Vector y = Y.col(j);
        const double target_norm = y.norm();
        if (target_norm == 0.0) continue;

        std::vector<Eigen::Index> support;
        std::vector<bool> in_support(static_cast<std::size_t>(n), false);
        Vector residual = y;
        Vector coeffs;

        while (static_cast<Eigen::Index>(support.size()) < support_cap &&
               residual.norm() > delta * target_norm) {
            // Pick the unused column best correlated with the residual.
            Eigen::Index best = -1;
            double best_corr = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (in_support[static_cast<std::size_t>(i)] || col_norms[i] == 0.0) continue;
                const double corr = std::abs(A.col(i).dot(residual)) / col_norms[i];
                if (corr > best_corr) {
                    best_corr = corr;
                    best = i;
                }
            }
            if (best < 0 || best_corr <= 0.0) break;  // residual orthogonal to all columns

            support.push_back(best);
            in_support[static_cast<std::size_t>(best)] = true;
            coeffs = solve_on_support(A, support, y);
            residual = y;
            for (std::size_t i = 0; i < support.size(); ++i)
                residual -= coeffs[static_cast<Eigen::Index>(i)] * A.col(support[i]);
        }

        for (std::size_t i = 0; i < support.size(); ++i) {
            report.solution(support[i], j) = coeffs[static_cast<Eigen::Index>(i)];
            selected_any[static_cast<std::size_t>(support[i])] = true;
        }
    }

    report.nnz = (report.solution.array() != 0.0).count();
    report.residual_frobenius = (A * report.solution - Y).norm();

    // ||(I - Q) Y||_F for Q projecting onto the span of every selected column.
    std::vector<Eigen::Index> union_support;
    for (Eigen::Index i = 0; i < n; ++i)
        if (selected_any[static_cast<std::size_t>(i)]) union_support.push_back(i);
    if (union_support.empty()) {
        report.projected_residual = Y.norm();
    } else {
        Matrix sub(A.rows(), static_cast<Eigen::Index>(union_support.size()));
        for (std::size_t i = 0; i < union_support.size(); ++i)
            sub.col(static_cast<Eigen::Index>(i)) = A.col(union_support[i]);
        Eigen::HouseholderQR<Matrix> qr(sub);
        Matrix q = Matrix::Identity(A.rows(), sub.cols());
        q = qr.householderQ() * q;  // thin orthonormal basis of the span
        report.projected_residual = (Y - q * (q.transpose() * Y)).norm();
    }

    // Tightest measured certificate with beta fixed at 1; nudge alpha upward
    // until the stored inequality holds under floating-point rounding.
    report.certificate_beta = 1.0;
    report.certificate_alpha =
        std::max(0.0, (report.residual_frobenius - report.projected_residual) / delta);
    while (report.certificate_alpha * delta + report.certificate_beta * report.projected_residual <
           report.residual_frobenius) {
        report.certificate_alpha =
            std::nextafter(report.certificate_alpha, std::numeric_limits<double>::infinity());
    }
    return report;
}

SparseSolveReport sparsify_matrix(const TrajectoryMatrix& H, const Matrix& A, double delta) {
    if (H.data.rows() != A.rows())
        throw ShapeError("sparsify_matrix: H has " + std::to_string(H.data.rows()) +
                         " rows but A has " + std::to_string(A.rows()));
    const ThresholdedRank rk = thresholded_rank(H.data, delta);
    if (rk.rank == 0)
        throw RankDeficiencyError("sparsify_matrix: rk_delta(H) = 0 at delta = " +
                                  std::to_string(delta));
    // H^T A_hat ~_delta H^T A; per-column supports of size <= rk_delta(H)
    // give at most M * rk_delta(H) nonzeros in total.
    return sparse_lsq(H.data.transpose(), H.data.transpose() * A, delta, rk.rank);
}

}  // namespace spars
