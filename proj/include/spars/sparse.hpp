#pragma once

#include <Eigen/Dense>
#include <optional>

#include "spars/series.hpp"
#include "spars/signal.hpp"

namespace spars {

/// delta-thresholded numerical rank: rk_delta(A) = #{ j : s_j(A) > delta }.
struct ThresholdedRank {
    double delta = 0.0;
    Vector singular_values;  // descending
    Eigen::Index rank = 0;
};

/// Solution of A X ~_delta Y together with its residual certificate:
/// ||A X - Y||_F <= certificate_alpha * delta + certificate_beta * ||(I-Q) Y||_F,
/// where Q projects onto the span of the columns of A selected by the solver.
struct SparseSolveReport {
    Matrix solution;                  // n x p
    Eigen::Index nnz = 0;             // entries with magnitude > 0
    double residual_frobenius = 0.0;  // ||A X - Y||_F
    double delta = 0.0;
    double certificate_alpha = 0.0;
    double certificate_beta = 1.0;
    double projected_residual = 0.0;  // ||(I - Q) Y||_F
};

ThresholdedRank thresholded_rank(const Matrix& A, double delta);

/// Greedy sparse least squares (orthogonal matching pursuit per column of Y).
/// Each column selects the column of A with the largest normalized residual
/// correlation (ties go to the lowest index), re-solves on the accumulated
/// support via QR, and stops once the column residual is <= delta * ||y|| or
/// the support reaches rk_delta(A). `max_nnz_per_column` caps the support
/// further when provided.
SparseSolveReport sparse_lsq(const Matrix& A, const Matrix& Y, double delta,
                             std::optional<Eigen::Index> max_nnz_per_column = std::nullopt);

/// Sparse re-representation of A (L x M) against the trajectory matrix H:
/// solves H^T A_hat ~_delta H^T A. The result has at most M * rk_delta(H)
/// nonzero entries.
SparseSolveReport sparsify_matrix(const TrajectoryMatrix& H, const Matrix& A, double delta);

}  // namespace spars
