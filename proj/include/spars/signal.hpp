#pragma once

#include <Eigen/Dense>

#include "spars/series.hpp"

namespace spars {

/// Hankel trajectory matrix H_L of a sample x_1..x_N:
/// L rows, N-L+1 columns, entry (i, j) = x_{i+j-1} (1-based).
struct TrajectoryMatrix {
    Matrix data;
    Eigen::Index L = 0;
    Eigen::Index N = 0;
};

/// Outcome of the AEP tail test |x_{t+kT} - x_t| <= epsilon for t >= S, k >= 0.
struct AepProfile {
    double epsilon = 0.0;
    Eigen::Index T = 1;   // approximate period
    Eigen::Index S = 1;   // first index of the approximately periodic tail
    bool satisfied = false;
};

/// Lag estimate from the autocorrelation function. `fallback` is set when no
/// dominant ACF peak exists and L defaulted to floor(N/4).
struct LagEstimate {
    Eigen::Index L = 1;
    bool fallback = false;
};

/// x_L(t) for L <= t <= N, oldest entry first.
WindowVector window(const TimeSeries& series, Eigen::Index L, Eigen::Index t);

/// Trajectory matrix of the full sample; requires L <= N.
TrajectoryMatrix hankel(const TimeSeries& series, Eigen::Index L);

/// Sample autocorrelation rho(0..max_lag) of the mean-centered series with the
/// biased 1/N normalization; rho(0) = 1. Throws DegenerateInputError on a
/// constant series.
Vector autocorrelation(const TimeSeries& series, Eigen::Index max_lag);

/// Lag of the first dominant positive ACF peak: the smallest l >= 2 where
/// rho(l) is a local maximum and rho(l) >= max(0.2, 2/sqrt(N)).
LagEstimate estimate_lag(const TimeSeries& series);

/// Estimate the approximate period T from the ACF peak and scan for the
/// smallest tail start S satisfying the AEP inequality at tolerance epsilon.
/// When no testable tail satisfies it, `satisfied` is false and S = N+1.
AepProfile estimate_period(const TimeSeries& series, double epsilon);

/// Verify the AEP inequality for a given (T, S) pair on the finite sample,
/// scanning k up to floor((N - t)/T) for every t in [S, N-T].
bool aep_holds(const TimeSeries& series, double epsilon, Eigen::Index T, Eigen::Index S);

}  // namespace spars
