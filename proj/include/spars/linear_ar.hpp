#pragma once

#include <Eigen/Dense>

#include "spars/series.hpp"
#include "spars/signal.hpp"
#include "spars/sparse.hpp"

namespace spars {

/// Coefficients of the linear block, most recent lag first:
/// prediction = c_1 x_t + c_2 x_{t-1} + ... + c_L x_{t-L+1}.
struct ArCoefficients {
    Vector c;
    Eigen::Index L = 0;
    Eigen::Index nnz = 0;
    double delta = 0.0;
};

/// L x L matrix form of a linear model: ones on the superdiagonal and the
/// reversed coefficient vector (c_L, ..., c_1) as the bottom row. Applied to a
/// window vector it shifts the window and appends the prediction.
struct CompanionMatrix {
    Matrix data;
    Eigen::Index L() const { return data.rows(); }
};

/// Fit the sparse AR coefficients on the training sample: the trajectory
/// matrix of x_1..x_{N-1} against targets x_{L+1}..x_N, solved by sparse_lsq.
/// The design matrix is assembled most-recent-lag-first so that correlation
/// ties resolve toward the shortest lag.
ArCoefficients fit_ar(const TimeSeries& train, Eigen::Index L, double delta);

/// Dense ordinary-least-squares fit of the same system (the non-sparse
/// baseline model).
ArCoefficients fit_ar_dense(const TimeSeries& train, Eigen::Index L);

CompanionMatrix companion(const ArCoefficients& coeffs);

/// One-step prediction c_1 x_t + ... + c_L x_{t-L+1} from an oldest-first window.
double predict_linear(const ArCoefficients& coeffs, const WindowVector& w);

/// Frobenius norm of H_L(S_0)^T (C_L^S)^T - H_L(S~_0)^T, where S~_0 is the
/// sample shifted forward by S steps. Measures how exactly the companion
/// matrix propagates the signal.
double shift_consistency(const ArCoefficients& coeffs, const TimeSeries& series,
                         Eigen::Index S);

/// A^power by repeated multiplication for power <= 64, by eigendecomposition
/// beyond (real part of V D^power V^{-1}).
Matrix matrix_power(const Matrix& A, Eigen::Index power);

}  // namespace spars
